#include "vidmem/dataio/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "vidmem/errors.hpp"
#include "vidmem/numerics/params.hpp"

namespace vidmem::dataio {
namespace {

constexpr double kScoreGain = 1.5;

Matrix gaussian(std::size_t rows, std::size_t cols, double scale, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix m{rows, cols, std::vector<double>(rows * cols)};
  for (double& v : m.values) v = scale * normal(rng);
  return m;
}

// Columns orthonormalized by modified Gram-Schmidt, then scaled.
Matrix orthogonal_columns(std::size_t rows, std::size_t cols, double scale, std::mt19937_64& rng) {
  Matrix m = gaussian(rows, cols, 1.0, rng);
  for (std::size_t c = 0; c < cols; ++c) {
    for (std::size_t prev = 0; prev < c; ++prev) {
      double proj = 0.0;
      for (std::size_t r = 0; r < rows; ++r) proj += m.values[r * cols + c] * m.values[r * cols + prev];
      for (std::size_t r = 0; r < rows; ++r) m.values[r * cols + c] -= proj * m.values[r * cols + prev];
    }
    double norm = 0.0;
    for (std::size_t r = 0; r < rows; ++r) norm += m.values[r * cols + c] * m.values[r * cols + c];
    norm = std::sqrt(norm);
    for (std::size_t r = 0; r < rows; ++r) m.values[r * cols + c] /= norm;
  }
  for (double& v : m.values) v *= scale;
  return m;
}

std::vector<double> unit_direction(std::size_t dim, double norm, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> w(dim);
  double sq = 0.0;
  for (double& v : w) {
    v = normal(rng);
    sq += v * v;
  }
  const double f = norm / std::sqrt(sq);
  for (double& v : w) v *= f;
  return w;
}

std::vector<double> apply(const Matrix& loading, const std::vector<double>& z) {
  std::vector<double> out(loading.rows, 0.0);
  for (std::size_t r = 0; r < loading.rows; ++r) {
    for (std::size_t c = 0; c < loading.cols; ++c) out[r] += loading.at(r, c) * z[c];
  }
  return out;
}

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

}  // namespace

void SyntheticConfig::validate() const {
  if (num_records < 2) throw ParameterError("synthetic: num_records must be >= 2");
  if (n == 0 || d_v == 0 || d_t == 0 || t_m == 0 || d_raw == 0 || latent_dim == 0) {
    throw ParameterError("synthetic: all dimensions must be positive");
  }
  if (latent_dim > d_t || latent_dim > d_raw) {
    throw ParameterError("synthetic: latent_dim must not exceed d_t or d_raw");
  }
  if (text_noise < 0 || motion_noise < 0 || frame_noise < 0 || score_noise < 0) {
    throw ParameterError("synthetic: noise levels must be non-negative");
  }
}

LatentModel LatentModel::create(const SyntheticConfig& cfg) {
  cfg.validate();
  std::mt19937_64 rng(mix_seed(cfg.seed, 0x10ADu));
  const double l = static_cast<double>(cfg.latent_dim);
  LatentModel model;
  model.latent_dim = cfg.latent_dim;
  model.text_loading = orthogonal_columns(cfg.d_t, cfg.latent_dim, std::sqrt(cfg.d_t / l), rng);
  model.motion_loading = orthogonal_columns(cfg.d_raw, cfg.latent_dim, std::sqrt(cfg.d_raw / l), rng);
  model.frame_loading = gaussian(cfg.d_v, cfg.latent_dim, 1.0 / std::sqrt(l), rng);
  model.st_weights = unit_direction(cfg.latent_dim, kScoreGain, rng);
  const std::vector<double> other = unit_direction(cfg.latent_dim, kScoreGain, rng);
  model.lt_weights.resize(cfg.latent_dim);
  for (std::size_t i = 0; i < cfg.latent_dim; ++i) {
    model.lt_weights[i] = 0.8 * model.st_weights[i] + 0.6 * other[i];
  }
  return model;
}

std::vector<double> LatentModel::draw_latent(std::mt19937_64& rng) const {
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> z(latent_dim);
  for (double& v : z) v = normal(rng);
  return z;
}

std::vector<double> LatentModel::text(const std::vector<double>& z, double noise, std::mt19937_64& rng) const {
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> t = apply(text_loading, z);
  for (double& v : t) v += noise * normal(rng);
  return t;
}

Matrix LatentModel::motion(const std::vector<double>& z, std::size_t length, double noise,
                           std::mt19937_64& rng) const {
  std::normal_distribution<double> normal(0.0, 1.0);
  const std::vector<double> mean = apply(motion_loading, z);
  Matrix m{length, mean.size(), {}};
  m.values.reserve(length * mean.size());
  for (std::size_t t = 0; t < length; ++t) {
    for (double v : mean) m.values.push_back(v + noise * normal(rng));
  }
  return m;
}

Matrix LatentModel::frames(const std::vector<double>& z, std::size_t count, double noise,
                           std::mt19937_64& rng) const {
  std::normal_distribution<double> normal(0.0, 1.0);
  const std::vector<double> mean = apply(frame_loading, z);
  Matrix m{count, mean.size(), {}};
  m.values.reserve(count * mean.size());
  for (std::size_t t = 0; t < count; ++t) {
    for (double v : mean) m.values.push_back(v + noise * normal(rng));
  }
  return m;
}

double LatentModel::true_st(const std::vector<double>& z) const { return sigmoid(dot(st_weights, z)); }
double LatentModel::true_lt(const std::vector<double>& z) const { return sigmoid(dot(lt_weights, z)); }

std::vector<FeatureRecord> generate_synthetic(const SyntheticConfig& cfg) {
  const LatentModel model = LatentModel::create(cfg);
  std::vector<FeatureRecord> records;
  records.reserve(cfg.num_records);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (std::size_t i = 0; i < cfg.num_records; ++i) {
    std::mt19937_64 rng(mix_seed(cfg.seed, 0x5EC0000ULL + i));
    const std::vector<double> z = model.draw_latent(rng);
    FeatureRecord rec;
    char id[32];
    std::snprintf(id, sizeof id, "vid%05zu", i);
    rec.video_id = id;
    rec.text = model.text(z, cfg.text_noise, rng);
    rec.motion_seq = model.motion(z, cfg.t_m, cfg.motion_noise, rng);
    rec.frames = model.frames(z, cfg.n, cfg.frame_noise, rng);
    rec.st_score = std::clamp(model.true_st(z) + cfg.score_noise * normal(rng), 0.0, 1.0);
    rec.lt_score = std::clamp(model.true_lt(z) + cfg.score_noise * normal(rng), 0.0, 1.0);
    records.push_back(std::move(rec));
  }
  return records;
}

}  // namespace vidmem::dataio
