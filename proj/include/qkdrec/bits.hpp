#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "qkdrec/kernels.hpp"

namespace qkdrec {

// Packed bit string over 64-bit words. XOR and popcount go through the
// kernel dispatch; everything else is trivial word arithmetic.
class BitVec {
   public:
    BitVec() = default;
    explicit BitVec(size_t n) : size_(n), words_((n + 63) / 64, 0) {}

    static BitVec from_string(const std::string &s) {
        BitVec v(s.size());
        for (size_t i = 0; i < s.size(); ++i) {
            if (s[i] == '1') {
                v.set(i, true);
            } else if (s[i] != '0') {
                throw std::invalid_argument("BitVec::from_string: expected only '0'/'1'");
            }
        }
        return v;
    }

    size_t size() const { return size_; }
    bool empty() const { return size_ == 0; }

    bool get(size_t i) const { return (words_[i >> 6] >> (i & 63)) & 1; }
    void set(size_t i, bool v) {
        uint64_t mask = uint64_t{1} << (i & 63);
        if (v) {
            words_[i >> 6] |= mask;
        } else {
            words_[i >> 6] &= ~mask;
        }
    }
    void flip(size_t i) { words_[i >> 6] ^= uint64_t{1} << (i & 63); }

    void push_back(bool v) {
        if (size_ % 64 == 0) {
            words_.push_back(0);
        }
        ++size_;
        set(size_ - 1, v);
    }

    uint64_t popcount() const {
        return kernels::active().popcount_words(words_.data(), words_.size());
    }

    BitVec operator^(const BitVec &o) const {
        require_same_size(o);
        BitVec out(size_);
        kernels::active().xor_words(out.words_.data(), words_.data(), o.words_.data(),
                                    words_.size());
        return out;
    }

    BitVec &operator^=(const BitVec &o) {
        require_same_size(o);
        kernels::active().xor_words(words_.data(), words_.data(), o.words_.data(), words_.size());
        return *this;
    }

    bool operator==(const BitVec &o) const { return size_ == o.size_ && words_ == o.words_; }
    bool operator!=(const BitVec &o) const { return !(*this == o); }

    uint64_t hamming_distance(const BitVec &o) const {
        require_same_size(o);
        uint64_t total = 0;
        for (size_t i = 0; i < words_.size(); ++i) {
            total += static_cast<uint64_t>(__builtin_popcountll(words_[i] ^ o.words_[i]));
        }
        return total;
    }

    BitVec slice(size_t begin, size_t len) const {
        if (begin + len > size_) {
            throw std::out_of_range("BitVec::slice out of range");
        }
        BitVec out(len);
        for (size_t i = 0; i < len; ++i) {
            out.set(i, get(begin + i));
        }
        return out;
    }

    void append(const BitVec &o) {
        for (size_t i = 0; i < o.size(); ++i) {
            push_back(o.get(i));
        }
    }

    std::string to_string() const {
        std::string s(size_, '0');
        for (size_t i = 0; i < size_; ++i) {
            if (get(i)) {
                s[i] = '1';
            }
        }
        return s;
    }

    const std::vector<uint64_t> &words() const { return words_; }

   private:
    void require_same_size(const BitVec &o) const {
        if (size_ != o.size_) {
            throw std::invalid_argument("BitVec: size mismatch");
        }
    }

    size_t size_ = 0;
    std::vector<uint64_t> words_;
};

}  // namespace qkdrec
