// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <complex>
#include <initializer_list>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace cogisac {

using cd = std::complex<double>;
using CVec = Eigen::VectorXcd;
using CMat = Eigen::MatrixXcd;
using RVec = Eigen::VectorXd;
using RMat = Eigen::MatrixXd;

/// Engine used for every random stream in the project.
using Rng = std::mt19937_64;

/// Base error. `module()` names the component that raised it, so front ends
/// can print module-tagged diagnostics.
class Error : public std::runtime_error {
public:
    Error(std::string module, const std::string& what)
        : std::runtime_error(what), module_(std::move(module)) {}

    const std::string& module() const noexcept { return module_; }

private:
    std::string module_;
};

/// Invalid parameters or preconditions (user-correctable).
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Operand shapes do not agree.
class DimensionError : public Error {
public:
    using Error::Error;
};

/// A numerical routine could not produce a valid result.
class NumericalError : public Error {
public:
    using Error::Error;
};

/// Derive an independent engine from a base seed and a list of stream tags.
/// Uses std::seed_seq so the mapping is fixed by the standard.
inline Rng derive_rng(std::uint64_t seed, std::initializer_list<std::uint32_t> tags) {
    std::vector<std::uint32_t> words;
    words.reserve(2 + tags.size());
    words.push_back(static_cast<std::uint32_t>(seed & 0xffffffffu));
    words.push_back(static_cast<std::uint32_t>(seed >> 32));
    words.insert(words.end(), tags.begin(), tags.end());
    std::seed_seq seq(words.begin(), words.end());
    return Rng(seq);
}

}  // namespace cogisac
