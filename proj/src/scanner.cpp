#include "scansim/scanner.hpp"

#include <algorithm>
#include <cmath>

#include "scansim/error.hpp"
#include "scansim/recognizer.hpp"
#include "scansim/similarity.hpp"

namespace scansim {

std::string_view to_string(InterventionCause c) {
  return c == InterventionCause::drift_exceeded ? "drift_exceeded" : "fit_failed";
}

void validate(const DeploymentConfig& cfg) {
  if (!(cfg.horizon_s >= 0.0)) throw InvalidConfig("deployment.horizon_s", "must be >= 0");
  if (cfg.sigma_y_m < 0.0) throw InvalidConfig("deployment.sigma_y_m", "must be >= 0");
  if (cfg.sigma_psi_rad < 0.0) throw InvalidConfig("deployment.sigma_psi_rad", "must be >= 0");
  if (cfg.sigma_pc_m < 0.0) throw InvalidConfig("deployment.sigma_pc_m", "must be >= 0");
  if (cfg.points_per_scan < 1) throw InvalidConfig("deployment.points_per_scan", "must be >= 1");
  if (cfg.reference_shelves < 1) throw InvalidConfig("deployment.reference_shelves", "must be >= 1");
  if (!(cfg.lidar_half_range_m > 0.0)) throw InvalidConfig("deployment.lidar_half_range_m", "must be > 0");
  if (!(cfg.intervention_threshold_m > 0.0)) {
    throw InvalidConfig("deployment.intervention_threshold_m", "must be > 0");
  }
  if (!(cfg.intervention_cost_s > 0.0)) throw InvalidConfig("deployment.intervention_cost_s", "must be > 0");
  if (cfg.t_image_s < 0.0 || cfg.t_move_s < 0.0 || cfg.t_correct_s < 0.0) {
    throw InvalidConfig("deployment.t_image_s", "pacing times must be >= 0");
  }
  if (cfg.t_image_s + cfg.t_move_s + cfg.t_correct_s <= 0.0) {
    throw InvalidConfig("deployment.t_image_s", "a stop must take time");
  }
  if (cfg.c_blur < 0.0 || cfg.c_skew < 0.0) throw InvalidConfig("deployment.c_blur", "must be >= 0");
  if (cfg.p_clutter < 0.0 || cfg.p_clutter > 1.0) throw InvalidConfig("deployment.p_clutter", "must be in [0,1]");
  if (cfg.clutter_points < 0) throw InvalidConfig("deployment.clutter_points", "must be >= 0");
  if (cfg.clutter_depth_min_m < 0.0 || cfg.clutter_depth_max_m < cfg.clutter_depth_min_m) {
    throw InvalidConfig("deployment.clutter_depth_min_m", "need 0 <= min <= max");
  }
  if (cfg.clutter_length_m < 0.0) throw InvalidConfig("deployment.clutter_length_m", "must be >= 0");
}

namespace {

Point3 to_robot_frame(double xw, double yw, double zw, const Pose& pose) {
  const double dx = xw - pose.x_m;
  const double dy = yw - pose.y_m;
  const double c = std::cos(pose.psi_rad);
  const double s = std::sin(pose.psi_rad);
  return {c * dx + s * dy, -s * dx + c * dy, zw};
}

}  // namespace

PointCloud synthesize_point_cloud(const ShelfWorld& world, const Pose& true_pose,
                                  const DeploymentConfig& cfg, std::uint64_t seed) {
  Rng rng(seed);
  const double half = world.config().aisle_width_m / 2.0;
  const double height = world.column_height_m();
  const double x_lo = std::max(0.0, true_pose.x_m - cfg.lidar_half_range_m);
  const double x_hi = std::min(world.side_length_m(), true_pose.x_m + cfg.lidar_half_range_m);

  PointCloud cloud;
  if (!(x_hi > x_lo)) return cloud;

  // Height-proportional: a short column returns fewer points.
  const auto n = static_cast<std::size_t>(std::llround(
      static_cast<double>(cfg.points_per_scan) * world.config().shelves_per_column /
      cfg.reference_shelves));
  std::uniform_real_distribution<double> along(x_lo, x_hi);
  std::uniform_real_distribution<double> up(0.0, height);
  std::normal_distribution<double> noise(0.0, cfg.sigma_pc_m > 0.0 ? cfg.sigma_pc_m : 1.0);
  const bool noisy = cfg.sigma_pc_m > 0.0;

  auto emit = [&](double xw, double yw, double zw) {
    Point3 p = to_robot_frame(xw, yw, zw, true_pose);
    if (noisy) {
      p.x += noise(rng);
      p.y += noise(rng);
      p.z = std::max(0.0, p.z + noise(rng));
    }
    cloud.points.push_back(p);
  };

  cloud.points.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double yw = (i % 2 == 0) ? -half : half;
    const double xw = along(rng);
    emit(xw, yw, up(rng));
  }

  std::bernoulli_distribution clutter(cfg.p_clutter);
  if (cfg.clutter_points > 0 && clutter(rng)) {
    std::bernoulli_distribution right(0.5);
    std::uniform_real_distribution<double> depth(cfg.clutter_depth_min_m, cfg.clutter_depth_max_m);
    const double side = right(rng) ? 1.0 : -1.0;
    const double yw = side * (half - depth(rng));
    const double xc = along(rng);
    std::uniform_real_distribution<double> spread(-cfg.clutter_length_m / 2.0,
                                                  cfg.clutter_length_m / 2.0);
    std::uniform_real_distribution<double> body(0.0, std::min(height, 1.8));
    for (int i = 0; i < cfg.clutter_points; ++i) emit(xc + spread(rng), yw, body(rng));
  }
  return cloud;
}

AisleEstimate fit_aisle_planes(const PointCloud& cloud, double aisle_width_m) {
  constexpr std::size_t kMinSide = 30;
  double sum_l[2] = {0, 0}, sum_r[2] = {0, 0};
  std::size_t n_l = 0, n_r = 0;
  for (const auto& p : cloud.points) {
    if (p.y < 0.0) {
      sum_l[0] += p.x;
      sum_l[1] += p.y;
      ++n_l;
    } else {
      sum_r[0] += p.x;
      sum_r[1] += p.y;
      ++n_r;
    }
  }
  if (n_l < kMinSide || n_r < kMinSide) {
    throw OneSidedCloud("need at least 30 points per side, got " + std::to_string(n_l) +
                        " left and " + std::to_string(n_r) + " right");
  }
  const double ml[2] = {sum_l[0] / n_l, sum_l[1] / n_l};
  const double mr[2] = {sum_r[0] / n_r, sum_r[1] / n_r};

  // Pooled scatter of the two centered clusters; both lines share its
  // principal direction.
  double sxx = 0, syy = 0, sxy = 0;
  for (const auto& p : cloud.points) {
    const double* m = p.y < 0.0 ? ml : mr;
    const double dx = p.x - m[0];
    const double dy = p.y - m[1];
    sxx += dx * dx;
    syy += dy * dy;
    sxy += dx * dy;
  }
  const double trace = sxx + syy;
  const double gap = std::hypot(sxx - syy, 2.0 * sxy);
  if (!(trace > 1e-18) || !(gap > 1e-12 * trace)) {
    throw DegenerateGeometry("pooled scatter has no dominant direction");
  }
  const double theta = 0.5 * std::atan2(2.0 * sxy, sxx - syy);
  const double nx = -std::sin(theta);
  const double ny = std::cos(theta);
  const double c_l = nx * ml[0] + ny * ml[1];
  const double c_r = nx * mr[0] + ny * mr[1];
  const double separation = c_r - c_l;
  if (std::abs(separation - aisle_width_m) > 0.5 * aisle_width_m) {
    throw DegenerateGeometry("fitted faces are " + std::to_string(separation) +
                             " m apart, expected about " + std::to_string(aisle_width_m));
  }
  return {-(c_l + c_r) / 2.0, -theta};
}

Pose correct_drift(const Pose& pose, const AisleEstimate& estimate) {
  return {pose.x_m, pose.y_m - estimate.y_hat_m, pose.psi_rad - estimate.psi_hat_rad};
}

Pose step_advance(const Pose& pose, const DeploymentConfig& cfg, Rng& rng,
                  std::size_t step_index, double advance_m) {
  Pose next = pose;
  next.x_m += advance_m;
  if (!cfg.drift_schedule_y_m.empty()) {
    next.y_m += cfg.drift_schedule_y_m[step_index % cfg.drift_schedule_y_m.size()];
    return next;
  }
  if (cfg.sigma_y_m > 0.0) next.y_m += std::normal_distribution<double>(0.0, cfg.sigma_y_m)(rng);
  if (cfg.sigma_psi_rad > 0.0) {
    next.psi_rad += std::normal_distribution<double>(0.0, cfg.sigma_psi_rad)(rng);
  }
  return next;
}

Observation capture(const ShelfWorld& world, const ScanWindow& window, const Pose& pose,
                    const DeploymentConfig& cfg, double timestamp_s) {
  Observation obs;
  obs.window = window;
  obs.capture_pose = pose;
  obs.timestamp_s = timestamp_s;
  obs.section_id = world.section_for(window);
  const double blur = cfg.c_blur * std::abs(pose.y_m) + cfg.c_skew * std::abs(pose.psi_rad);
  for (const auto& b : ground_truth(world, window)) {
    const auto& rec = world.catalog().at(b.record_index);
    obs.visible.push_back({b.book_id, std::clamp(b.degradation + blur, 0.0, 1.0), rec.title,
                           format_call_number(rec.call_number)});
  }
  return obs;
}

std::size_t total_stops(const ShelfWorld& world) {
  return static_cast<std::size_t>(world.config().num_aisles) * 2 * stops_per_side(world);
}

DeploymentResult run_deployment(const ShelfWorld& world, const RecognizerModel& model,
                                const DeploymentConfig& cfg, std::uint64_t seed,
                                const DeploymentOptions& options) {
  validate(cfg);
  DeploymentResult result;
  auto& log = result.log;
  log.seed = seed;
  log.next_stop = options.start_stop;

  const auto& wcfg = world.config();
  const std::size_t per_side = stops_per_side(world);
  const std::size_t stops = total_stops(world);
  if (cfg.horizon_s <= 0.0 || stops == 0) return result;

  SubstitutionIndex local_index(world.catalog());
  SubstitutionIndex& subs = options.substitutions ? *options.substitutions : local_index;
  const double half_width = wcfg.aisle_width_m / 2.0;

  Rng drift(derive_seed(seed, Stream::kDrift));
  std::set<ShelfId> shelves;
  std::size_t g = options.start_stop % stops;
  std::size_t step = 0;
  double t = 0.0;
  Pose pose;
  bool placed = false;
  bool out_of_time = false;

  auto intervene = [&](InterventionCause cause, const Pose& before) {
    log.interventions.push_back({options.time_offset_s + t, before, cause});
    t += cfg.intervention_cost_s;
    pose.y_m = 0.0;
    pose.psi_rad = 0.0;
  };

  while (t < cfg.horizon_s && log.stops_visited < stops && !out_of_time) {
    const std::size_t k = g % per_side;
    const int side = static_cast<int>((g / per_side) % 2);
    const int aisle = static_cast<int>(g / per_side / 2);
    const double x = static_cast<double>(k) * wcfg.advance_m;

    // The robot is placed centered at the start of the run and at the
    // head of each aisle side.
    if (!placed || k == 0) {
      pose = {x, 0.0, 0.0};
      placed = true;
    } else {
      pose = step_advance(pose, cfg, drift, step++, wcfg.advance_m);
      pose.x_m = x;
    }
    t += cfg.t_move_s;

    if (std::abs(pose.y_m) >= half_width) {
      intervene(InterventionCause::drift_exceeded, pose);
    } else {
      const auto cloud =
          synthesize_point_cloud(world, pose, cfg, derive_seed(seed, Stream::kCloud, g, log.stops_visited));
      t += cfg.t_correct_s;
      try {
        const Pose corrected = correct_drift(pose, fit_aisle_planes(cloud, wcfg.aisle_width_m));
        if (std::abs(corrected.y_m) > cfg.intervention_threshold_m) {
          intervene(InterventionCause::drift_exceeded, corrected);
        } else {
          pose = corrected;
        }
      } catch (const OneSidedCloud&) {
        intervene(InterventionCause::fit_failed, pose);
      } catch (const DegenerateGeometry&) {
        intervene(InterventionCause::fit_failed, pose);
      }
    }

    const int column = std::min(wcfg.columns_per_side - 1,
                                static_cast<int>(std::floor(x / wcfg.shelf_width_m + 1e-9)));
    for (int level = 0; level < wcfg.shelves_per_column; ++level) {
      if (t >= cfg.horizon_s) {
        out_of_time = true;
        break;
      }
      const ScanWindow window{aisle, side, column, level, x, x + wcfg.camera_coverage_m};
      if (options.held_out && options.held_out->overlaps(window, wcfg.shelf_width_m)) continue;

      Observation obs = capture(world, window, pose, cfg, options.time_offset_s + t);
      const auto candidates = world.catalog().candidate_set(obs.section_id);
      auto predicted = predict_labels(model, obs, candidates,
                                      derive_seed(seed, Stream::kPredict, g, log.stops_visited * 64 + level),
                                      &subs.table(obs.section_id));
      result.raw.push_back({std::move(obs), std::move(predicted)});
      ++log.images_captured;

      const int last_col = std::min(
          wcfg.columns_per_side - 1,
          static_cast<int>(std::ceil(window.x_hi / wcfg.shelf_width_m - 1e-9)) - 1);
      for (int c = column; c <= last_col; ++c) shelves.insert({aisle, side, c, level});
      t += cfg.t_image_s;
    }
    ++log.stops_visited;
    g = (g + 1) % stops;
  }

  log.shelves_scanned = shelves.size();
  log.elapsed_s = t;
  log.next_stop = g;
  return result;
}

}  // namespace scansim
