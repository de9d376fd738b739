#include "phantom.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "error.hpp"
#include "rng.hpp"

namespace spa {

namespace {

constexpr int kMaxPlacementAttempts = 100000;
constexpr std::uint64_t kCylinderStream = 0x6379'6c69'6e64'6572ull;

int wavelength_index(double wavelength_nm) {
  for (std::size_t i = 0; i < kStudyWavelengths.size(); ++i) {
    if (kStudyWavelengths[i] == wavelength_nm) return static_cast<int>(i);
  }
  return -1;
}

Vec3 voxel_size(const PhantomConfig& c) {
  return {c.volume_size_mm.x / c.grid_dims[0], c.volume_size_mm.y / c.grid_dims[1],
          c.volume_size_mm.z / c.grid_dims[2]};
}

double squared_distance_to_axis(const Cylinder& cyl, Vec3 p) {
  const Vec3 d = p - cyl.point_mm;
  const double along = dot(d, cyl.axis);
  return std::max(0.0, dot(d, d) - along * along);
}

bool inside(const Cylinder& cyl, Vec3 p) {
  return squared_distance_to_axis(cyl, p) <= cyl.radius_mm * cyl.radius_mm;
}

// Cross-section acceptance: at least one slice pixel is blood and none sit in
// the masked top rows.
bool acceptable_in_slice(const Cylinder& cyl, const PhantomConfig& c) {
  const Vec3 h = voxel_size(c);
  const double y = (c.grid_dims[1] / 2 + 0.5) * h.y;
  bool any = false;
  for (int iz = 0; iz < c.grid_dims[2]; ++iz) {
    for (int ix = 0; ix < c.grid_dims[0]; ++ix) {
      if (inside(cyl, {(ix + 0.5) * h.x, y, (iz + 0.5) * h.z})) {
        if (iz < c.masked_rows) return false;
        any = true;
      }
    }
  }
  return any;
}

}  // namespace

OpticalProperties layer_properties(TissueLabel layer, double wavelength_nm) {
  const int w = wavelength_index(wavelength_nm);
  if (w < 0) {
    throw ValidationError("no tissue properties tabulated at " + std::to_string(wavelength_nm) + " nm");
  }
  // mu_a, mu_s in cm^-1 at 700 / 850 nm.
  static constexpr OpticalProperties kTable[3][2] = {
      {{0.5542, 42.59, 0.9}, {0.2933, 35.17, 0.9}},
      {{0.0168, 259.45, 0.9}, {0.0369, 212.31, 0.9}},
      {{0.0433, 119.76, 0.9}, {0.0575, 99.02, 0.9}},
  };
  if (layer > kBreastLabel) {
    throw ValidationError("not a layer label: " + std::to_string(int{layer}));
  }
  return kTable[layer][w];
}

void PhantomConfig::validate() const {
  auto fail = [](const std::string& msg) { throw ConfigError("phantom config: " + msg); };
  for (int d : grid_dims) {
    if (d < 16) fail("grid_dims must be >= 16 per axis");
  }
  if (!(volume_size_mm.x > 0 && volume_size_mm.y > 0 && volume_size_mm.z > 0)) {
    fail("volume_size_mm must be positive");
  }
  if (!(epidermis_mm >= 0 && dermis_mm >= 0 && breast_mm >= 0)) fail("layer thicknesses must be non-negative");
  const double total = epidermis_mm + dermis_mm + breast_mm;
  if (std::abs(total - volume_size_mm.z) > 1e-9 * std::max(1.0, volume_size_mm.z)) {
    std::ostringstream msg;
    msg << "layer thicknesses sum to " << total << " mm but volume depth is " << volume_size_mm.z << " mm";
    fail(msg.str());
  }
  if (min_cylinders < 0 || max_cylinders < min_cylinders) fail("invalid cylinder count range");
  if (max_cylinders > 255 - kFirstBloodLabel) fail("too many cylinders");
  const double half = 0.5 * std::min({volume_size_mm.x, volume_size_mm.y, volume_size_mm.z});
  if (!(min_radius_mm > 0.0) || !(max_radius_mm >= min_radius_mm) || !(max_radius_mm < half)) {
    fail("radius range must lie within (0, volume_size/2)");
  }
  if (!(min_so2 >= 0.0 && max_so2 <= 1.0 && min_so2 <= max_so2)) fail("so2 range must lie within [0, 1]");
  if (masked_rows < 0 || masked_rows >= grid_dims[2]) fail("masked_rows must lie in [0, nz)");
}

TissueVolume::TissueVolume(Grid3<std::uint8_t> labels, Vec3 voxel_size_mm, std::vector<double> wavelengths,
                           std::vector<std::vector<OpticalProperties>> props, std::vector<Cylinder> cylinders)
    : labels_(std::move(labels)),
      voxel_size_mm_(voxel_size_mm),
      wavelengths_(std::move(wavelengths)),
      props_(std::move(props)),
      cylinders_(std::move(cylinders)) {
  if (!(voxel_size_mm_.x > 0 && voxel_size_mm_.y > 0 && voxel_size_mm_.z > 0)) {
    throw ValidationError("voxel size must be positive");
  }
  for (const auto& per_label : props_) {
    if (per_label.size() != wavelengths_.size()) {
      throw ValidationError("every label needs properties at every wavelength");
    }
    for (const auto& p : per_label) p.validate();
  }
  for (std::uint8_t label : labels_.data()) {
    if (label >= props_.size()) {
      throw ValidationError("label " + std::to_string(int{label}) + " has no optical properties");
    }
  }
}

Vec3 TissueVolume::size_mm() const noexcept {
  return {voxel_size_mm_.x * labels_.nx(), voxel_size_mm_.y * labels_.ny(), voxel_size_mm_.z * labels_.nz()};
}

bool TissueVolume::has_wavelength(double wavelength_nm) const noexcept {
  return std::find(wavelengths_.begin(), wavelengths_.end(), wavelength_nm) != wavelengths_.end();
}

const OpticalProperties& TissueVolume::properties(std::uint8_t label, double wavelength_nm) const {
  const auto it = std::find(wavelengths_.begin(), wavelengths_.end(), wavelength_nm);
  if (it == wavelengths_.end()) {
    throw ValidationError("volume has no optical properties at " + std::to_string(wavelength_nm) + " nm");
  }
  if (label >= props_.size()) {
    throw ValidationError("unknown tissue label " + std::to_string(int{label}));
  }
  return props_[label][static_cast<std::size_t>(it - wavelengths_.begin())];
}

bool operator==(const TissueVolume& a, const TissueVolume& b) {
  auto same_cyl = [](const Cylinder& p, const Cylinder& q) {
    return p.point_mm == q.point_mm && p.axis == q.axis && p.radius_mm == q.radius_mm && p.so2 == q.so2;
  };
  return a.labels_ == b.labels_ && a.voxel_size_mm_ == b.voxel_size_mm_ && a.wavelengths_ == b.wavelengths_ &&
         a.props_ == b.props_ &&
         std::equal(a.cylinders_.begin(), a.cylinders_.end(), b.cylinders_.begin(), b.cylinders_.end(), same_cyl);
}

std::vector<Cylinder> draw_cylinders(const PhantomConfig& config) {
  config.validate();
  CounterRng rng(config.seed, kCylinderStream);
  const Vec3 h = voxel_size(config);
  const Vec3 size = config.volume_size_mm;
  const double slice_y = (config.grid_dims[1] / 2 + 0.5) * h.y;
  const double z_top = config.masked_rows * h.z;

  const auto count = static_cast<int>(rng.uniform_int(config.min_cylinders, config.max_cylinders));
  std::vector<Cylinder> cylinders;
  for (int k = 0; k < count; ++k) {
    int attempt = 0;
    while (true) {
      if (++attempt > kMaxPlacementAttempts) {
        throw ConfigError("could not place a vessel below the masked rows; check radius range and geometry");
      }
      Cylinder cyl;
      cyl.radius_mm = config.min_radius_mm + (config.max_radius_mm - config.min_radius_mm) * rng.uniform();
      cyl.point_mm = {size.x * rng.uniform(), slice_y, z_top + (size.z - z_top) * rng.uniform()};
      const double cos_polar = 2.0 * rng.uniform() - 1.0;
      const double sin_polar = std::sqrt(std::max(0.0, 1.0 - cos_polar * cos_polar));
      const double azimuth = 2.0 * std::numbers::pi * rng.uniform();
      cyl.axis = {sin_polar * std::cos(azimuth), sin_polar * std::sin(azimuth), cos_polar};
      cyl.so2 = config.min_so2 + (config.max_so2 - config.min_so2) * rng.uniform();
      if (acceptable_in_slice(cyl, config)) {
        cylinders.push_back(cyl);
        break;
      }
    }
  }
  return cylinders;
}

TissueVolume build_volume(const PhantomConfig& config, const ChromophoreSpectrum& spectrum) {
  return build_volume_with_cylinders(config, spectrum, draw_cylinders(config));
}

TissueVolume build_volume_with_cylinders(const PhantomConfig& config, const ChromophoreSpectrum& spectrum,
                                         std::vector<Cylinder> cylinders) {
  config.validate();
  if (cylinders.size() > 255u - kFirstBloodLabel) {
    throw ConfigError("too many cylinders");
  }
  for (const auto& cyl : cylinders) {
    if (std::abs(norm(cyl.axis) - 1.0) > 1e-9) throw ValidationError("cylinder axis must be a unit vector");
    if (!(cyl.radius_mm > 0.0)) throw ValidationError("cylinder radius must be positive");
    if (!(cyl.so2 >= 0.0 && cyl.so2 <= 1.0)) throw ValidationError("cylinder so2 must lie in [0, 1]");
  }

  const auto [nx, ny, nz] = config.grid_dims;
  const Vec3 h = voxel_size(config);
  const double dermis_top = config.epidermis_mm;
  const double breast_top = config.epidermis_mm + config.dermis_mm;

  Grid3<std::uint8_t> labels(nx, ny, nz);
  for (int iz = 0; iz < nz; ++iz) {
    const double z = (iz + 0.5) * h.z;
    const std::uint8_t layer = z < dermis_top ? kEpidermisLabel : z < breast_top ? kDermisLabel : kBreastLabel;
    for (int iy = 0; iy < ny; ++iy) {
      for (int ix = 0; ix < nx; ++ix) {
        const Vec3 p{(ix + 0.5) * h.x, (iy + 0.5) * h.y, z};
        std::uint8_t label = layer;
        for (std::size_t k = 0; k < cylinders.size(); ++k) {
          if (inside(cylinders[k], p)) label = static_cast<std::uint8_t>(kFirstBloodLabel + k);
        }
        labels(ix, iy, iz) = label;
      }
    }
  }

  std::vector<double> wavelengths(kStudyWavelengths.begin(), kStudyWavelengths.end());
  std::vector<std::vector<OpticalProperties>> props;
  for (auto layer : {kEpidermisLabel, kDermisLabel, kBreastLabel}) {
    auto& row = props.emplace_back();
    for (double wl : wavelengths) row.push_back(layer_properties(layer, wl));
  }
  // Blood shares the breast scattering; only absorption differs.
  for (const auto& cyl : cylinders) {
    auto& row = props.emplace_back();
    for (double wl : wavelengths) {
      OpticalProperties p = layer_properties(kBreastLabel, wl);
      p.mu_a = spectrum.blood_mu_a(cyl.so2, wl);
      row.push_back(p);
    }
  }
  return TissueVolume(std::move(labels), h, std::move(wavelengths), std::move(props), std::move(cylinders));
}

Image vessel_mask_slice(const TissueVolume& volume) {
  const auto& labels = volume.labels();
  const int y = volume.central_y();
  Image mask(labels.nz(), labels.nx());
  for (int iz = 0; iz < labels.nz(); ++iz) {
    for (int ix = 0; ix < labels.nx(); ++ix) {
      mask(iz, ix) = labels(ix, y, iz) >= kFirstBloodLabel ? 1.0 : 0.0;
    }
  }
  return mask;
}

Image gt_so2_slice(const TissueVolume& volume) {
  const auto& labels = volume.labels();
  const auto& cylinders = volume.cylinders();
  const int y = volume.central_y();
  Image so2(labels.nz(), labels.nx());
  for (int iz = 0; iz < labels.nz(); ++iz) {
    for (int ix = 0; ix < labels.nx(); ++ix) {
      const std::uint8_t label = labels(ix, y, iz);
      if (label >= kFirstBloodLabel) {
        so2(iz, ix) = cylinders.at(label - kFirstBloodLabel).so2;
      }
    }
  }
  return so2;
}

}  // namespace spa
