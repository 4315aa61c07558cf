#pragma once

#include <cstdint>

// Empirical constants fixed by tools/calcap_calibrate. Rerun it and paste the new block when a probe changes.
namespace calcap::calibration {

// CZ smoothness of P, n = 1: largest ratio over 10^6 triples was 2.00 (seed 20240601); default 8 kept.
inline constexpr double kCzConstant = 8.0;
inline constexpr std::uint64_t kCzSeed = 20240601;

// n = 1 battery: {10 Q_j} max 156, {5 Q_i} max 148, headroom 1.10 (seed 20240602)
inline constexpr int kWhitneyOverlapBound = 172;
inline constexpr int kCoverOverlapBound = 163;
inline constexpr std::uint64_t kOverlapSeed = 20240602;

}  // namespace calcap::calibration
