#pragma once

// Frozen experiment constants. The probability floor and matching cap were
// measured on the d=8 hypercube-layers instance at 10^4 samples (means over
// several seeds: ~0.175 and ~0.0004) and then frozen with wide margins; they
// are calibration values, not derived quantities.
namespace sparsecut::calibration {

inline constexpr double kDeltaKappa = 0.1;   // delta = kappa / sqrt(log2 n)
inline constexpr double kCPrime = 0.05;
inline constexpr int kGaussianRetries = 50;

// delta used by hypercube-instance experiments: exactly one hypercube step,
// so the short-edge graph is the (layer-restricted) hypercube adjacency
inline constexpr double kHypercubeDelta = 0.25;

inline constexpr double kLrHypercubeMinProb = 0.12;
inline constexpr double kMatchingHypercubeMeanCap = 0.002;

}  // namespace sparsecut::calibration
