#include "qkdrec/channels.hpp"

namespace qkdrec {

void validate_probability(double v, const char *what) {
    if (!(v >= 0.0 && v <= 1.0)) {
        throw std::invalid_argument(std::string(what) + " must lie in [0, 1]");
    }
}

PauliFrame apply_depolarizing(PauliFrame frame, const DepolarizingParams &params, Rng &rng) {
    validate_probability(params.p, "depolarizing p");
    const double u = rng.next_double();
    if (u < params.p) {
        // Equal thirds of the error band -> X, Y, Z.
        const double band = u / params.p;
        Pauli e = band < 1.0 / 3.0 ? Pauli::X : (band < 2.0 / 3.0 ? Pauli::Y : Pauli::Z);
        frame.apply(e);
    }
    return frame;
}

PauliFrame apply_intercept_resend(PauliFrame frame, const InterceptResendParams &params,
                                  Rng &rng) {
    validate_probability(params.s, "intercept probability s");
    if (rng.next_double() >= params.s) {
        return frame;
    }
    const Basis eve_basis = random_basis(rng);
    uint8_t outcome;
    if (eve_basis == frame.prep_basis) {
        outcome = frame.prep_bit ^ static_cast<uint8_t>(measurement_flip(frame.error, eve_basis));
    } else {
        outcome = static_cast<uint8_t>(rng.next_bit());
    }
    return PauliFrame{eve_basis, outcome, Pauli::I};
}

namespace {
PauliFrame apply_channel_stage(const PauliFrame &f, const InterceptResendParams &p, Rng &rng) {
    return apply_intercept_resend(f, p, rng);
}
PauliFrame apply_channel_stage(const PauliFrame &f, const DepolarizingParams &p, Rng &rng) {
    return apply_depolarizing(f, p, rng);
}
}  // namespace

PauliFrame apply_stack(PauliFrame frame, const ChannelStack &stack, Rng &rng) {
    for (const auto &stage : stack.stages) {
        frame = std::visit(
            [&](const auto &params) { return apply_channel_stage(frame, params, rng); }, stage);
    }
    return frame;
}

double analytic_sifted_qber(double p, double s) {
    validate_probability(p, "depolarizing p");
    validate_probability(s, "intercept probability s");
    const double a = s / 4.0;
    const double b = 2.0 * p / 3.0;
    return a + b - 2.0 * a * b;
}

}  // namespace qkdrec
