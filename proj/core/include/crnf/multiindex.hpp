#pragma once

#include <array>
#include <cstdint>
#include <string>

#include "crnf/errors.hpp"

namespace crnf {

// Exponent tuple for up to 4 variables, packed into one 64-bit key so that
// integer comparison gives the graded ordering (total degree first, then the
// exponent tuple).
class MultiIndex {
public:
    static constexpr int kMaxVars = 4;

    MultiIndex() : key_(0) {}

    explicit MultiIndex(std::array<unsigned, 4> e) { set(e); }

    static MultiIndex unit(int var, unsigned exp = 1) {
        std::array<unsigned, 4> e{0, 0, 0, 0};
        e[static_cast<size_t>(var)] = exp;
        return MultiIndex(e);
    }

    unsigned operator[](int i) const {
        return static_cast<unsigned>((key_ >> shift(i)) & 0xFFFu);
    }

    unsigned total() const { return static_cast<unsigned>(key_ >> 48); }

    MultiIndex operator+(const MultiIndex& o) const {
        MultiIndex r;
        r.key_ = key_ + o.key_;  // no carries: exponents stay < 4096 at desk scale
        return r;
    }

    std::array<unsigned, 4> exponents() const {
        return {(*this)[0], (*this)[1], (*this)[2], (*this)[3]};
    }

    friend bool operator==(const MultiIndex& a, const MultiIndex& b) { return a.key_ == b.key_; }
    friend bool operator!=(const MultiIndex& a, const MultiIndex& b) { return a.key_ != b.key_; }
    friend bool operator<(const MultiIndex& a, const MultiIndex& b) { return a.key_ < b.key_; }

    uint64_t key() const { return key_; }

private:
    static int shift(int i) { return 36 - 12 * i; }

    void set(const std::array<unsigned, 4>& e) {
        uint64_t total = 0;
        key_ = 0;
        for (int i = 0; i < 4; ++i) {
            if (e[static_cast<size_t>(i)] > 0xFFFu)
                raise(ErrorCode::ArithmeticError, "exponent too large for multi-index");
            total += e[static_cast<size_t>(i)];
            key_ |= static_cast<uint64_t>(e[static_cast<size_t>(i)]) << shift(i);
        }
        key_ |= total << 48;
    }

    uint64_t key_;
};

}  // namespace crnf
