#pragma once

#include <cstdint>
#include <string>

#include "fishpart/augmentation.hpp"
#include "fishpart/mask_ops.hpp"
#include "fishpart/part_segmentation.hpp"

namespace fishpart {

struct SyntheticConfig {
    BodyProfile profile = BodyProfile::Flatfish;
    double rotation_deg = 0.0;  // counter-clockwise on screen
    HeadSide head_side = HeadSide::Left;
    double scale = 1.0;
    int margin = 12;
};

/// Procedurally built fish with its construction recorded in raster
/// coordinates.
///
/// The outline is a body ellipse (or, for the fusiform profile, separate
/// upper and lower half-ellipses) joined to a caudal fin by a straight
/// peduncle taper that narrows to the tail notches and flares out again.
struct SyntheticFish {
    Image image;
    BinaryMask mask;
    BodyProfile profile = BodyProfile::Flatfish;
    double rotation_deg = 0.0;
    HeadSide head_side = HeadSide::Left;
    Affine2 local_to_raster;  // construction frame (head toward -x) to raster

    FeaturePointSet truth;  // notches, tail length, snout and head chord
    EllipseParams body;     // construction body ellipse (flatfish upper half for fusiform)
    EllipseParams head;     // head ellipse built from the true feature points
    PartLabelMap parts;     // construction partition: head, then body, then fins
};

SyntheticFish make_synthetic_fish(std::uint64_t seed, const SyntheticConfig& config = {});

/// Square lesion patch: reddish irregular blob on skin-colored margin.
PatchRecord make_disease_patch(std::uint64_t seed, int size, const std::string& patch_id);

}  // namespace fishpart
