#pragma once

#include <cstdint>
#include <string>

#include "scalpel/harness/sequence.hpp"

namespace scalpel {

enum class PerturbKind { gaussian_noise, joint_occlusion, boundary_jitter, temporal_rescale };

/// Throws ContractError on an unknown name.
PerturbKind parse_perturb_kind(const std::string& name);
std::string to_string(PerturbKind kind);

/// Magnitude 0 returns the input unchanged for every kind.
///
/// gaussian_noise    adds N(0, (magnitude * std(data))^2), std over all values
/// joint_occlusion   zeroes floor(magnitude * V) seeded joints in every frame
/// boundary_jitter   moves each boundary by a seeded integer in
///                   [-round(m), round(m)], then re-clamps so boundaries stay
///                   strictly increasing inside (0, T); data is unchanged
/// temporal_rescale  linear resampling of time to round(T * magnitude) frames
///                   (corner aligned); labels follow the nearest source frame
SkeletonSequence perturb(const SkeletonSequence& seq, PerturbKind kind, double magnitude, std::uint64_t seed);

}  // namespace scalpel
