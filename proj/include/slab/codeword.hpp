#pragma once

// Sign codewords and TDOA vectors, both laid out in canonical pair order
// (1,2), (1,3), (2,3), (1,4), ... i.e. slot l = (j-2)(j-1)/2 + i for 1-based i < j.

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "slab/error.hpp"
#include "slab/geometry.hpp"

namespace slab {

/// 1-based pair index l = (j-2)(j-1)/2 + i, bijective onto [1, n(n-1)/2].
inline std::size_t pair_index(std::size_t i, std::size_t j, std::size_t n) {
    if (i < 1 || i >= j || j > n) throw Error(ErrorKind::BadPair, "pair index needs 1 <= i < j <= n");
    return (j - 2) * (j - 1) / 2 + i;
}

/// sgn with sgn(0) = +1, keeping codewords in {+1, -1}.
constexpr std::int8_t sign_of(double v) { return v >= 0.0 ? std::int8_t{1} : std::int8_t{-1}; }

class CharacteristicVector {
public:
    CharacteristicVector() = default;
    explicit CharacteristicVector(std::vector<std::int8_t> bits) : bits_(std::move(bits)) {
        for (auto b : bits_)
            if (b != 1 && b != -1) throw Error(ErrorKind::InvalidArgument, "codeword entries must be +1 or -1");
    }

    std::size_t size() const { return bits_.size(); }
    std::int8_t operator[](std::size_t l) const { return bits_[l]; }
    const std::vector<std::int8_t>& bits() const { return bits_; }

    CharacteristicVector with_flipped(std::size_t l) const {
        auto copy = *this;
        copy.bits_.at(l) = static_cast<std::int8_t>(-copy.bits_[l]);
        return copy;
    }

    /// "+-+..." rendering used by the region bundle.
    std::string to_string() const {
        std::string s;
        s.reserve(bits_.size());
        for (auto b : bits_) s.push_back(b > 0 ? '+' : '-');
        return s;
    }
    static CharacteristicVector parse(const std::string& s) {
        std::vector<std::int8_t> bits;
        bits.reserve(s.size());
        for (char ch : s) {
            if (ch == '+') bits.push_back(1);
            else if (ch == '-') bits.push_back(-1);
            else throw Error(ErrorKind::InvalidArgument, "codeword string must contain only + and -");
        }
        return CharacteristicVector(std::move(bits));
    }

    friend bool operator==(const CharacteristicVector&, const CharacteristicVector&) = default;
    friend auto operator<=>(const CharacteristicVector&, const CharacteristicVector&) = default;

private:
    std::vector<std::int8_t> bits_;
};

/// Number of differing positions.
inline std::size_t hamming(const CharacteristicVector& a, const CharacteristicVector& b) {
    if (a.size() != b.size()) throw Error(ErrorKind::LengthMismatch, "codeword lengths differ");
    std::size_t d = 0;
    for (std::size_t l = 0; l < a.size(); ++l) d += a[l] != b[l];
    return d;
}

/// tau(l) = t_i - t_j in canonical pair order, seconds.
class TdoaVector {
public:
    TdoaVector() = default;
    TdoaVector(std::vector<double> values, std::size_t sensors) : values_(std::move(values)), sensors_(sensors) {
        if (values_.size() != pair_count(sensors))
            throw Error(ErrorKind::LengthMismatch, "TDOA length does not match sensor count");
    }

    std::size_t size() const { return values_.size(); }
    std::size_t sensors() const { return sensors_; }
    double operator[](std::size_t l) const { return values_[l]; }
    const std::vector<double>& values() const { return values_; }

private:
    std::vector<double> values_;
    std::size_t sensors_ = 0;
};

inline TdoaVector tdoa_from_toas(const std::vector<double>& toas) {
    if (toas.size() < 2) throw Error(ErrorKind::LengthMismatch, "need at least two arrival times");
    std::vector<double> tau(pair_count(toas.size()));
    for_each_pair(toas.size(), [&](std::size_t l, std::size_t i, std::size_t j) { tau[l] = toas[i] - toas[j]; });
    return TdoaVector(std::move(tau), toas.size());
}

inline CharacteristicVector sign_vector(const TdoaVector& tau) {
    std::vector<std::int8_t> bits(tau.size());
    for (std::size_t l = 0; l < tau.size(); ++l) bits[l] = sign_of(tau[l]);
    return CharacteristicVector(std::move(bits));
}

}  // namespace slab
