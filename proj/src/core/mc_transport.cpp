#include "mc_transport.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <thread>

#include "error.hpp"
#include "raw_io.hpp"
#include "rng.hpp"

namespace spa {

namespace {

// Deposits are accumulated as integers in units of 2^-40 of a packet weight.
// Integer addition is associative, so merging worker buffers gives the same
// bits for every thread count and schedule.
constexpr double kFixedScale = 0x1.0p40;
constexpr std::uint64_t kChunkPackets = 1024;
constexpr std::uint64_t kPacketStreamTag = 0x7068'6f74'6f6e'7321ull;
// Well below the 2^-40 accumulator resolution.
constexpr double kNegligibleWeight = 1e-15;

using Wide = __int128;

// Weights stay far below 2^23, so the signed conversion (a single
// instruction, unlike the unsigned one) cannot overflow.
inline std::uint64_t to_fixed(double w) noexcept {
  return static_cast<std::uint64_t>(static_cast<std::int64_t>(w * kFixedScale + 0.5));
}

struct Medium {
  double mu_t;           // mm^-1
  double inv_mu_t;       // 0 for a void
  double absorb_frac;    // mu_a / mu_t
  HgSampler hg;
};

struct Accumulator {
  std::vector<std::uint64_t> deposits;
  Wide escaped = 0;
  Wide roulette_net = 0;
  std::uint64_t clipped = 0;
};

struct Context {
  const std::uint8_t* labels;
  std::vector<Medium> media;
  int nx, ny, nz;
  double hx, hy, hz;
  double lx, ly;
  double beam_radius, beam_cx, beam_cy;
  double roulette_threshold;
  double roulette_factor;
  std::uint64_t key;
};

// Rotates d by polar angle theta and azimuth phi (given by cosines/sines).
inline Vec3 rotate(Vec3 d, double cos_theta, double cos_phi, double sin_phi) noexcept {
  const double sin_theta = std::sqrt(std::max(0.0, 1.0 - cos_theta * cos_theta));
  const double lateral = std::sqrt(d.x * d.x + d.y * d.y);
  Vec3 out;
  if (lateral < 1e-12) {
    out = {sin_theta * cos_phi, sin_theta * sin_phi, std::copysign(cos_theta, d.z)};
  } else {
    const double k = sin_theta / lateral;
    out = {k * (d.x * d.z * cos_phi - d.y * sin_phi) + d.x * cos_theta,
           k * (d.y * d.z * cos_phi + d.x * sin_phi) + d.y * cos_theta,
           -sin_theta * cos_phi * lateral + d.z * cos_theta};
  }
  return out;
}

// Distance along u to the next voxel face on one axis.
inline double face_distance(double p, int i, double h, double u) noexcept {
  if (u > 0.0) return ((i + 1) * h - p) / u;
  if (u < 0.0) return (i * h - p) / u;
  return std::numeric_limits<double>::infinity();
}

void run_packet(const Context& ctx, std::uint64_t packet, Accumulator& acc) {
  StreamRng rng(ctx.key, packet);

  double px, py;
  while (true) {
    const double r = ctx.beam_radius * std::sqrt(rng.uniform());
    const double a = 2.0 * std::numbers::pi * rng.uniform();
    px = ctx.beam_cx + r * std::cos(a);
    py = ctx.beam_cy + r * std::sin(a);
    if (px >= 0.0 && px < ctx.lx && py >= 0.0 && py < ctx.ly) break;
    ++acc.clipped;
  }
  double pz = 0.0;
  int ix = std::min(static_cast<int>(px / ctx.hx), ctx.nx - 1);
  int iy = std::min(static_cast<int>(py / ctx.hy), ctx.ny - 1);
  int iz = 0;
  double ux = 0.0, uy = 0.0, uz = 1.0;
  double w = 1.0;

  const std::size_t stride_y = static_cast<std::size_t>(ctx.nx);
  const std::size_t stride_z = stride_y * ctx.ny;
  std::size_t voxel = iz * stride_z + iy * stride_y + ix;
  // Faces of the current voxel.
  double x0, x1, y0, y1, z0, z1;
  auto set_bounds = [&] {
    x0 = ix * ctx.hx;
    x1 = (ix + 1) * ctx.hx;
    y0 = iy * ctx.hy;
    y1 = (iy + 1) * ctx.hy;
    z0 = iz * ctx.hz;
    z1 = (iz + 1) * ctx.hz;
  };
  set_bounds();

  while (true) {
    // Optical depth to the next interaction, consumed voxel by voxel.
    double depth = -std::log(rng.uniform_open());
    const Medium* m = &ctx.media[ctx.labels[voxel]];
    // Most free paths end inside the current voxel; try that first.
    if (m->mu_t > 0.0) {
      const double step = depth * m->inv_mu_t;
      const double qx = px + step * ux, qy = py + step * uy, qz = pz + step * uz;
      if (qx >= x0 && qx < x1 && qy >= y0 && qy < y1 && qz >= z0 && qz < z1) {
        px = qx;
        py = qy;
        pz = qz;
        depth = 0.0;
      }
    }
    while (depth > 0.0) {
      const double tx = face_distance(px, ix, ctx.hx, ux);
      const double ty = face_distance(py, iy, ctx.hy, uy);
      const double tz = face_distance(pz, iz, ctx.hz, uz);
      double t = std::min({tx, ty, tz});
      if (t < 0.0) t = 0.0;
      const double tau = m->mu_t * t;
      if (tau >= depth) {
        const double step = depth / m->mu_t;
        px += step * ux;
        py += step * uy;
        pz += step * uz;
        break;
      }
      depth -= tau;
      px += t * ux;
      py += t * uy;
      pz += t * uz;
      bool escaped;
      if (tx <= ty && tx <= tz) {
        ix += ux > 0.0 ? 1 : -1;
        escaped = ix < 0 || ix >= ctx.nx;
      } else if (ty <= tz) {
        iy += uy > 0.0 ? 1 : -1;
        escaped = iy < 0 || iy >= ctx.ny;
      } else {
        iz += uz > 0.0 ? 1 : -1;
        escaped = iz < 0 || iz >= ctx.nz;
      }
      if (escaped) {
        acc.escaped += to_fixed(w);
        return;
      }
      voxel = iz * stride_z + iy * stride_y + ix;
      m = &ctx.media[ctx.labels[voxel]];
      set_bounds();
    }

    const double dw = w * m->absorb_frac;
    acc.deposits[voxel] += to_fixed(dw);
    w -= dw;
    if (!(w > 0.0)) return;
    // Without roulette a packet is retired once its weight drops below what
    // the accumulator can resolve; the remainder is absorbed where it stands.
    if (ctx.roulette_threshold == 0.0 && w < kNegligibleWeight) {
      acc.deposits[voxel] += to_fixed(w);
      return;
    }

    const double cos_theta = m->hg(rng.uniform());
    // Azimuth from a point in the unit disk (polar method), no trig needed.
    double a, b, r2;
    do {
      a = 2.0 * rng.uniform() - 1.0;
      b = 2.0 * rng.uniform() - 1.0;
      r2 = a * a + b * b;
    } while (r2 > 1.0 || r2 == 0.0);
    const double inv_r2 = 1.0 / r2;
    const Vec3 d = rotate({ux, uy, uz}, cos_theta, (a * a - b * b) * inv_r2, 2.0 * a * b * inv_r2);
    ux = d.x;
    uy = d.y;
    uz = d.z;

    if (w < ctx.roulette_threshold) {
      if (rng.uniform() * ctx.roulette_factor < 1.0) {
        acc.roulette_net -= static_cast<Wide>(to_fixed(w * (ctx.roulette_factor - 1.0)));
        w *= ctx.roulette_factor;
      } else {
        acc.roulette_net += to_fixed(w);
        return;
      }
    }
  }
}

}  // namespace

void TransportConfig::validate() const {
  if (n_photons < 1) throw ConfigError("transport: n_photons must be >= 1");
  if (!(roulette_threshold >= 0.0 && roulette_threshold < 1.0)) {
    throw ConfigError("transport: roulette threshold must lie in [0, 1)");
  }
  if (roulette_factor < 2 || roulette_factor > 1'000'000) {
    throw ConfigError("transport: roulette survival factor must lie in [2, 1e6]");
  }
}

HgSampler::HgSampler(double g) noexcept
    : isotropic_(std::abs(g) < 1e-9),
      num_(1.0 - g * g),
      // g = 1 is a forward delta; keep the denominator off zero at u = 0
      base_(std::max(1.0 - g, std::numeric_limits<double>::min())),
      slope_(2.0 * g),
      sum_(1.0 + g * g),
      inv_2g_(isotropic_ ? 0.0 : 1.0 / (2.0 * g)) {}

double sample_hg(double g, double u) noexcept { return HgSampler(g)(u); }

Vec3 spin(Vec3 d, double cos_theta, double phi) noexcept {
  const Vec3 out = rotate(d, cos_theta, std::cos(phi), std::sin(phi));
  const double inv = 1.0 / norm(out);
  return {out.x * inv, out.y * inv, out.z * inv};
}

AbsorbedEnergyMap simulate(const TissueVolume& volume, double wavelength_nm, const BeamSpec& beam,
                           const TransportConfig& config) {
  config.validate();
  if (!volume.has_wavelength(wavelength_nm)) {
    throw ValidationError("volume has no optical properties at " + std::to_string(wavelength_nm) + " nm");
  }
  if (!(beam.diameter_mm > 0.0)) throw ConfigError("beam diameter must be positive");

  const auto& labels = volume.labels();
  const Vec3 h = volume.voxel_size_mm();
  const Vec3 size = volume.size_mm();

  Context ctx{};
  ctx.labels = labels.data().data();
  for (std::size_t label = 0; label < volume.label_count(); ++label) {
    const auto& p = volume.properties(static_cast<std::uint8_t>(label), wavelength_nm);
    const double mu_a = p.mu_a / 10.0;  // cm^-1 -> mm^-1
    const double mu_t = (p.mu_a + p.mu_s) / 10.0;
    ctx.media.push_back({mu_t, mu_t > 0.0 ? 1.0 / mu_t : 0.0, mu_t > 0.0 ? mu_a / mu_t : 0.0, HgSampler(p.g)});
  }
  ctx.nx = labels.nx();
  ctx.ny = labels.ny();
  ctx.nz = labels.nz();
  ctx.hx = h.x;
  ctx.hy = h.y;
  ctx.hz = h.z;
  ctx.lx = size.x;
  ctx.ly = size.y;
  ctx.beam_radius = 0.5 * beam.diameter_mm;
  ctx.beam_cx = beam.center_mm ? (*beam.center_mm)[0] : 0.5 * size.x;
  ctx.beam_cy = beam.center_mm ? (*beam.center_mm)[1] : 0.5 * size.y;
  ctx.roulette_threshold = config.roulette_threshold;
  ctx.roulette_factor = config.roulette_factor;
  ctx.key = derive_seed(config.seed, kPacketStreamTag);

  {
    // The beam disk must overlap the face or no packet can ever launch.
    const double nearest_x = std::clamp(ctx.beam_cx, 0.0, size.x);
    const double nearest_y = std::clamp(ctx.beam_cy, 0.0, size.y);
    if (std::hypot(nearest_x - ctx.beam_cx, nearest_y - ctx.beam_cy) >= ctx.beam_radius) {
      throw ConfigError("beam does not illuminate the top face");
    }
  }

  const std::uint64_t n = config.n_photons;
  const std::uint64_t n_chunks = (n + kChunkPackets - 1) / kChunkPackets;
  unsigned workers = config.threads != 0 ? config.threads : std::max(1u, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(std::min<std::uint64_t>(workers, n_chunks));

  std::vector<Accumulator> accs(workers);
  std::atomic<std::uint64_t> next_chunk{0};
  auto work = [&](unsigned id) {
    Accumulator& acc = accs[id];
    acc.deposits.assign(labels.size(), 0);
    for (std::uint64_t chunk; (chunk = next_chunk.fetch_add(1)) < n_chunks;) {
      const std::uint64_t end = std::min(n, (chunk + 1) * kChunkPackets);
      for (std::uint64_t p = chunk * kChunkPackets; p < end; ++p) run_packet(ctx, p, acc);
    }
  };
  if (workers == 1) {
    work(0);
  } else {
    std::vector<std::jthread> pool;
    for (unsigned id = 0; id < workers; ++id) pool.emplace_back(work, id);
  }

  Accumulator total = std::move(accs[0]);
  for (unsigned id = 1; id < workers; ++id) {
    for (std::size_t i = 0; i < total.deposits.size(); ++i) total.deposits[i] += accs[id].deposits[i];
    total.escaped += accs[id].escaped;
    total.roulette_net += accs[id].roulette_net;
    total.clipped += accs[id].clipped;
  }

  const double unit = 1.0 / (kFixedScale * static_cast<double>(n));
  AbsorbedEnergyMap map;
  map.grid = Grid3<double>(labels.nx(), labels.ny(), labels.nz());
  map.voxel_size_mm = h;
  Wide deposited = 0;
  for (std::size_t i = 0; i < total.deposits.size(); ++i) {
    map.grid.data()[i] = static_cast<double>(total.deposits[i]) * unit;
    deposited += total.deposits[i];
  }
  map.deposited_weight = static_cast<double>(deposited) * unit;
  map.escaped_weight = static_cast<double>(total.escaped) * unit;
  map.roulette_net_loss = static_cast<double>(total.roulette_net) * unit;
  map.n_photons = n;
  map.clipped_draws = total.clipped;
  return map;
}

void write_mcvol(const std::filesystem::path& path, const AbsorbedEnergyMap& map) {
  const auto& g = map.grid;
  if (std::abs(map.voxel_size_mm.x - map.voxel_size_mm.y) > 1e-12 ||
      std::abs(map.voxel_size_mm.x - map.voxel_size_mm.z) > 1e-12) {
    throw ValidationError("MCVOL dumps require cubic voxels");
  }
  std::ostringstream header;
  header.precision(17);
  header << "MCVOL " << g.nx() << ' ' << g.ny() << ' ' << g.nz() << ' ' << map.voxel_size_mm.x << '\n';
  std::string bytes = header.str();
  std::vector<float> values(g.data().begin(), g.data().end());
  raw_io::append_f32_le(bytes, values);
  raw_io::write_file(path, bytes);
}

Grid3<float> read_mcvol(const std::filesystem::path& path, double* voxel_mm) {
  const std::string bytes = raw_io::read_file(path);
  const auto nl = bytes.find('\n');
  if (nl == std::string::npos) throw DataError(DataError::Kind::Parse, path.string() + ": missing MCVOL header");
  std::istringstream header(bytes.substr(0, nl));
  std::string magic;
  int nx = 0, ny = 0, nz = 0;
  double h = 0.0;
  if (!(header >> magic >> nx >> ny >> nz >> h) || magic != "MCVOL" || nx <= 0 || ny <= 0 || nz <= 0) {
    throw DataError(DataError::Kind::Parse, path.string() + ": malformed MCVOL header");
  }
  Grid3<float> grid(nx, ny, nz);
  if (bytes.size() - nl - 1 != grid.size() * 4) {
    throw DataError(DataError::Kind::Truncated, path.string() + ": payload size does not match header");
  }
  raw_io::read_f32_le(bytes.data() + nl + 1, grid.data());
  if (voxel_mm) *voxel_mm = h;
  return grid;
}

}  // namespace spa
