#pragma once

#include <cstdint>

#include "qkdrec/rng.hpp"

namespace qkdrec {

// Pauli error class with global phase discarded: composition over {I,X,Y,Z}
// is then the Klein four-group, every element self-inverse.
enum class Pauli : uint8_t { I = 0, X = 1, Y = 2, Z = 3 };

// Encoded so that the two-bit patterns are (z_component, x_component):
// I=00, X=01, Y=11... kept opaque; composition is XOR of the codes below.
constexpr Pauli compose(Pauli a, Pauli b) {
    // I,X,Y,Z map to 0,1,2,3; the phase-stripped product is the XOR of the
    // symplectic encodings I=00 X=01 Z=10 Y=11.
    constexpr uint8_t to_sym[4] = {0b00, 0b01, 0b11, 0b10};
    constexpr Pauli from_sym[4] = {Pauli::I, Pauli::X, Pauli::Z, Pauli::Y};
    return from_sym[to_sym[static_cast<uint8_t>(a)] ^ to_sym[static_cast<uint8_t>(b)]];
}

enum class Basis : uint8_t { Rectilinear = 0, Diagonal = 1 };

constexpr char to_char(Pauli p) { return "IXYZ"[static_cast<uint8_t>(p)]; }
constexpr char to_char(Basis b) { return b == Basis::Rectilinear ? '+' : 'x'; }

// Whether the error flips the measurement outcome in the given basis.
// Rectilinear: X and Y flip; Diagonal: Z and Y flip; I never flips.
constexpr bool measurement_flip(Pauli error, Basis basis) {
    const bool x_part = error == Pauli::X || error == Pauli::Y;
    const bool z_part = error == Pauli::Z || error == Pauli::Y;
    return basis == Basis::Rectilinear ? x_part : z_part;
}

inline Basis random_basis(Rng &rng) {
    return rng.next_bit() ? Basis::Diagonal : Basis::Rectilinear;
}

// Symbolic record of a transmitted qubit: preparation plus the accumulated
// Pauli error. Stands in for the quantum state; everything downstream is
// classical, so amplitudes are never needed.
struct PauliFrame {
    Basis prep_basis = Basis::Rectilinear;
    uint8_t prep_bit = 0;
    Pauli error = Pauli::I;

    void apply(Pauli p) { error = compose(error, p); }
};

}  // namespace qkdrec
