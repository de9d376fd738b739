#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "chromophores.hpp"
#include "grid.hpp"

namespace spa {

/// Tissue labels stored in the volume grid. Blood vessel k (0-based, in
/// cylinder order) is stored as kFirstBloodLabel + k.
enum TissueLabel : std::uint8_t {
  kEpidermisLabel = 0,
  kDermisLabel = 1,
  kBreastLabel = 2,
  kFirstBloodLabel = 3,
};

inline constexpr std::array<double, 2> kStudyWavelengths = {700.0, 850.0};

/// Reference optical properties of the three skin/breast layers.
OpticalProperties layer_properties(TissueLabel layer, double wavelength_nm);

struct PhantomConfig {
  Vec3 volume_size_mm{38.0, 38.0, 38.0};
  std::array<int, 3> grid_dims{128, 128, 128};
  double epidermis_mm = 0.3;
  double dermis_mm = 4.7;
  double breast_mm = 33.0;
  int min_cylinders = 1;
  int max_cylinders = 3;
  double min_radius_mm = 0.5;
  double max_radius_mm = 4.0;
  double min_so2 = 0.0;
  double max_so2 = 1.0;
  /// Vessel cross-sections must stay below this many image rows.
  int masked_rows = 50;
  std::uint64_t seed = 0;

  /// Throws ConfigError on violated invariants. A cylinder count range of
  /// [0, 0] is accepted and yields a layers-only volume.
  void validate() const;
};

struct Cylinder {
  Vec3 point_mm;  ///< a point on the axis
  Vec3 axis;      ///< unit direction
  double radius_mm = 0.0;
  double so2 = 0.0;
};

/// Voxelized tissue with per-label optical properties at the study
/// wavelengths. Depth z runs from the illuminated top face (z = 0) downward.
class TissueVolume {
 public:
  TissueVolume(Grid3<std::uint8_t> labels, Vec3 voxel_size_mm, std::vector<double> wavelengths,
               std::vector<std::vector<OpticalProperties>> props, std::vector<Cylinder> cylinders);

  const Grid3<std::uint8_t>& labels() const noexcept { return labels_; }
  Vec3 voxel_size_mm() const noexcept { return voxel_size_mm_; }
  Vec3 size_mm() const noexcept;
  const std::vector<double>& wavelengths() const noexcept { return wavelengths_; }
  const std::vector<Cylinder>& cylinders() const noexcept { return cylinders_; }
  std::size_t label_count() const noexcept { return props_.size(); }

  bool has_wavelength(double wavelength_nm) const noexcept;
  /// Throws ValidationError when the label or the wavelength is unknown.
  const OpticalProperties& properties(std::uint8_t label, double wavelength_nm) const;

  /// y index of the imaged cross-section, floor(ny / 2).
  int central_y() const noexcept { return labels_.ny() / 2; }

  friend bool operator==(const TissueVolume&, const TissueVolume&);

 private:
  Grid3<std::uint8_t> labels_;
  Vec3 voxel_size_mm_;
  std::vector<double> wavelengths_;
  std::vector<std::vector<OpticalProperties>> props_;  // [label][wavelength index]
  std::vector<Cylinder> cylinders_;
};

/// Layered volume with 1-3 random vessels. Pure function of the config (seed
/// included). Each vessel is re-drawn until its cross-section in the central
/// slice is non-empty and lies entirely below `masked_rows`.
TissueVolume build_volume(const PhantomConfig& config, const ChromophoreSpectrum& spectrum);

/// Same layering with caller-specified vessels, no placement constraints.
TissueVolume build_volume_with_cylinders(const PhantomConfig& config, const ChromophoreSpectrum& spectrum,
                                         std::vector<Cylinder> cylinders);

/// The random vessel draw used by build_volume, exposed for statistics.
std::vector<Cylinder> draw_cylinders(const PhantomConfig& config);

/// Binary blood mask of the central x-z cross-section (rows = z, cols = x).
Image vessel_mask_slice(const TissueVolume& volume);

/// sO2 of the vessel occupying each pixel of the central slice, 0 elsewhere.
Image gt_so2_slice(const TissueVolume& volume);

}  // namespace spa
