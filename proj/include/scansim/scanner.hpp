#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "scansim/rng.hpp"
#include "scansim/world.hpp"

namespace scansim {

struct RecognizerModel;
class SubstitutionIndex;

// Robot pose in aisle coordinates: x along the aisle, y lateral offset
// from the centerline (+y towards side 1), psi heading relative to the
// aisle direction.
struct Pose {
  double x_m = 0.0;
  double y_m = 0.0;
  double psi_rad = 0.0;

  bool operator==(const Pose&) const = default;
};

struct Point3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
};

struct PointCloud {
  std::vector<Point3> points;  // robot frame, meters
};

struct DeploymentConfig {
  double horizon_s = 14400.0;  // 4 h
  double sigma_y_m = 0.02;
  double sigma_psi_rad = 0.01;
  double sigma_pc_m = 0.01;
  int points_per_scan = 2000;  // for a column of reference_shelves levels
  int reference_shelves = 7;
  double lidar_half_range_m = 2.0;
  double intervention_threshold_m = 0.15;
  double intervention_cost_s = 300.0;
  double t_image_s = 2.0;
  double t_move_s = 3.0;
  double t_correct_s = 1.0;
  double c_blur = 0.5;
  double c_skew = 0.3;
  // Transient obstacles (carts, patrons) seen by the LiDAR. Their return
  // count does not scale with shelf height, so short columns are hit
  // harder.
  double p_clutter = 0.018;
  int clutter_points = 3000;
  double clutter_depth_min_m = 0.3;
  double clutter_depth_max_m = 0.5;
  double clutter_length_m = 0.5;
  // When non-empty, replaces the Gaussian lateral drift: step k adds
  // drift_schedule_y_m[k % size] and heading drift is zero.
  std::vector<double> drift_schedule_y_m;
};

void validate(const DeploymentConfig& cfg);

struct ImageMeta {
  int height = 810;
  int width = 1080;
  int channels = 3;
};

struct VisibleBook {
  std::string book_id;
  double effective_degradation = 0.0;
  // Label text printed on the spine; what a perfect reader would return.
  std::string title;
  std::string call_number;
};

struct Observation {
  ScanWindow window;
  std::vector<VisibleBook> visible;  // left to right, ground-truth order
  Pose capture_pose;
  double timestamp_s = 0.0;
  ImageMeta meta;
  std::string section_id;
};

struct LabelEntry {
  std::string title;
  std::string call_number;

  bool operator==(const LabelEntry&) const = default;
};

using LabelSequence = std::vector<LabelEntry>;

struct RawExample {
  Observation observation;
  LabelSequence predicted;
};

using RawDataset = std::vector<RawExample>;

enum class InterventionCause { drift_exceeded, fit_failed };

std::string_view to_string(InterventionCause c);

struct InterventionEvent {
  double timestamp_s = 0.0;
  Pose pose_before;
  InterventionCause cause = InterventionCause::drift_exceeded;
};

struct DeploymentLog {
  std::size_t shelves_scanned = 0;  // unique shelves seen this deployment
  std::size_t images_captured = 0;
  std::size_t stops_visited = 0;
  std::vector<InterventionEvent> interventions;
  double elapsed_s = 0.0;
  std::uint64_t seed = 0;
  std::size_t next_stop = 0;  // where a follow-up deployment resumes
};

// Where a deployment starts and what it must not photograph.
struct DeploymentOptions {
  std::size_t start_stop = 0;  // index into the global stop sequence, wraps
  double time_offset_s = 0.0;  // added to every timestamp
  const HeldOut* held_out = nullptr;
  SubstitutionIndex* substitutions = nullptr;  // optional shared cache
};

PointCloud synthesize_point_cloud(const ShelfWorld& world, const Pose& true_pose,
                                  const DeploymentConfig& cfg, std::uint64_t seed);

struct AisleEstimate {
  double y_hat_m = 0.0;
  double psi_hat_rad = 0.0;
};

// Parallel-line total least squares on the horizontal projection.
AisleEstimate fit_aisle_planes(const PointCloud& cloud, double aisle_width_m);

Pose correct_drift(const Pose& pose, const AisleEstimate& estimate);

// One 0.3 m advance with random-walk drift drawn from rng.
Pose step_advance(const Pose& pose, const DeploymentConfig& cfg, Rng& rng,
                  std::size_t step_index = 0, double advance_m = 0.3);

Observation capture(const ShelfWorld& world, const ScanWindow& window, const Pose& pose,
                    const DeploymentConfig& cfg, double timestamp_s = 0.0);

struct DeploymentResult {
  RawDataset raw;
  DeploymentLog log;
};

DeploymentResult run_deployment(const ShelfWorld& world, const RecognizerModel& model,
                                const DeploymentConfig& cfg, std::uint64_t seed,
                                const DeploymentOptions& options = {});

// Total stops in one full traversal of the world.
std::size_t total_stops(const ShelfWorld& world);

}  // namespace scansim
