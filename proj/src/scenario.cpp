#include "cartpush/scenario.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "cartpush/errors.hpp"
#include "json.hpp"

namespace cartpush {

namespace {

using nlohmann::json;

[[noreturn]] void bad_key(const std::string& path, const std::string& why) {
  throw ConfigError("config key '" + path + "': " + why);
}

void check_keys(const json& j, const std::string& path, const std::set<std::string>& known) {
  for (const auto& [key, value] : j.items()) {
    if (!known.count(key)) bad_key(path.empty() ? key : path + "." + key, "unknown key");
  }
}

double get_num(const json& j, const std::string& path, const std::string& key, double dflt) {
  if (!j.contains(key)) return dflt;
  if (!j[key].is_number()) bad_key(path + "." + key, "expected a number");
  return j[key].get<double>();
}

std::string get_str(const json& j, const std::string& path, const std::string& key,
                    const std::string& dflt) {
  if (!j.contains(key)) return dflt;
  if (!j[key].is_string()) bad_key(path + "." + key, "expected a string");
  return j[key].get<std::string>();
}

std::vector<double> get_vec(const json& j, const std::string& path, const std::string& key) {
  std::vector<double> out;
  if (!j.contains(key)) return out;
  if (!j[key].is_array()) bad_key(path + "." + key, "expected an array of numbers");
  for (const auto& v : j[key]) {
    if (!v.is_number()) bad_key(path + "." + key, "expected an array of numbers");
    out.push_back(v.get<double>());
  }
  return out;
}

Eigen::Vector3d get_vec3(const json& j, const std::string& path, const std::string& key,
                         const Eigen::Vector3d& dflt) {
  if (!j.contains(key)) return dflt;
  const std::vector<double> v = get_vec(j, path, key);
  if (v.size() != 3) bad_key(path + "." + key, "expected exactly 3 numbers");
  return {v[0], v[1], v[2]};
}

Pose2 get_pose(const json& j, const std::string& path, const std::string& key,
               const Pose2& dflt) {
  if (!j.contains(key)) return dflt;
  const std::vector<double> v = get_vec(j, path, key);
  if (v.size() != 3) bad_key(path + "." + key, "expected [x, y, theta]");
  return {v[0], v[1], v[2]};
}

void parse_planner(const json& j, ScenarioSpec* s) {
  check_keys(j, "planner",
             {"variant", "horizon", "dt", "q", "qn_scale", "r", "u_min", "u_max",
              "max_iters", "replan_interval"});
  s->planner_variant = get_str(j, "planner", "variant", s->planner_variant);
  planner_variant_from_string(s->planner_variant);  // validates
  s->horizon = static_cast<int>(get_num(j, "planner", "horizon", s->horizon));
  if (s->horizon < 2) bad_key("planner.horizon", "must be at least 2");
  s->planner_dt = get_num(j, "planner", "dt", s->planner_dt);
  if (s->planner_dt <= 0.0) bad_key("planner.dt", "must be positive");
  s->qn_scale = get_num(j, "planner", "qn_scale", s->qn_scale);
  s->q_weights = get_vec(j, "planner", "q");
  s->r_weights = get_vec(j, "planner", "r");
  s->u_min = get_vec(j, "planner", "u_min");
  s->u_max = get_vec(j, "planner", "u_max");
  s->max_iters = static_cast<int>(get_num(j, "planner", "max_iters", s->max_iters));
  s->replan_interval_s = get_num(j, "planner", "replan_interval", s->replan_interval_s);
}

void parse_model(const json& j, ScenarioSpec* s) {
  check_keys(j, "model", {"R", "L", "L_c", "L1", "L2", "r_L", "r_F"});
  s->model.R = get_num(j, "model", "R", s->model.R);
  s->model.L = get_num(j, "model", "L", s->model.L);
  s->model.L_c = get_num(j, "model", "L_c", s->model.L_c);
  s->model.L1 = get_num(j, "model", "L1", s->model.L1);
  s->model.L2 = get_num(j, "model", "L2", s->model.L2);
  s->model.r_L = get_num(j, "model", "r_L", s->model.r_L);
  s->model.r_F = get_num(j, "model", "r_F", s->model.r_F);
  for (const double v : {s->model.R, s->model.L, s->model.L_c, s->model.L1, s->model.L2}) {
    if (v <= 0.0) bad_key("model", "lengths must be positive");
  }
}

void parse_geometry(const json& j, ScenarioSpec* s) {
  check_keys(j, "geometry",
             {"l1", "l2", "l3", "mount_x", "mount_y_left", "mount_y_right",
              "cart_half_link"});
  s->geom.l1 = get_num(j, "geometry", "l1", s->geom.l1);
  s->geom.l2 = get_num(j, "geometry", "l2", s->geom.l2);
  s->geom.l3 = get_num(j, "geometry", "l3", s->geom.l3);
  s->geom.mount_x = get_num(j, "geometry", "mount_x", s->geom.mount_x);
  s->geom.mount_y_left = get_num(j, "geometry", "mount_y_left", s->geom.mount_y_left);
  s->geom.mount_y_right = get_num(j, "geometry", "mount_y_right", s->geom.mount_y_right);
  s->geom.cart_half_link = get_num(j, "geometry", "cart_half_link", s->geom.cart_half_link);
  if (s->geom.l1 <= 0 || s->geom.l2 <= 0 || s->geom.l3 <= 0) {
    bad_key("geometry", "link lengths must be positive");
  }
}

void parse_plant(const json& j, ScenarioSpec* s) {
  check_keys(j, "plant",
             {"kind", "b_true", "damping", "coulomb", "m_cart_nominal", "mu_roll",
              "payload_smoothing", "lag_tau", "saturation"});
  s->plant_kind = get_str(j, "plant", "kind", s->plant_kind);
  if (s->plant_kind != "model" && s->plant_kind != "chain") {
    bad_key("plant.kind", "expected model|chain");
  }
  s->plant.b_true = get_vec3(j, "plant", "b_true", s->plant.b_true);
  s->plant.damping = get_vec3(j, "plant", "damping", s->plant.damping);
  s->plant.coulomb = get_vec3(j, "plant", "coulomb", s->plant.coulomb);
  s->plant.m_cart_nominal = get_num(j, "plant", "m_cart_nominal", s->plant.m_cart_nominal);
  s->plant.mu_roll = get_num(j, "plant", "mu_roll", s->plant.mu_roll);
  s->plant.payload_smoothing =
      get_num(j, "plant", "payload_smoothing", s->plant.payload_smoothing);
  const std::vector<double> lag = get_vec(j, "plant", "lag_tau");
  if (!lag.empty()) {
    if (lag.size() != 4) bad_key("plant.lag_tau", "expected exactly 4 numbers");
    for (int i = 0; i < 4; ++i) s->kinematic.lag_tau[i] = lag[i];
  }
  const std::vector<double> sat = get_vec(j, "plant", "saturation");
  if (!sat.empty()) {
    if (sat.size() != 4) bad_key("plant.saturation", "expected exactly 4 numbers");
    for (int i = 0; i < 4; ++i) s->kinematic.saturation[i] = sat[i];
  }
}

void parse_disturbances(const json& j, ScenarioSpec* s) {
  if (!j.is_array()) bad_key("disturbances", "expected an array");
  int idx = 0;
  for (const auto& item : j) {
    const std::string path = "disturbances[" + std::to_string(idx++) + "]";
    check_keys(item, path,
               {"type", "channel", "magnitude", "mass_kg", "force_n", "lever_m", "start_s",
                "duration_s", "sigma", "tau_s", "seed"});
    DisturbanceTerm t;
    const std::string type = get_str(item, path, "type", "");
    if (type == "constant") {
      t.kind = DisturbanceTerm::Kind::kConstant;
    } else if (type == "payload") {
      t.kind = DisturbanceTerm::Kind::kPayload;
    } else if (type == "impulse") {
      t.kind = DisturbanceTerm::Kind::kImpulse;
    } else if (type == "noise") {
      t.kind = DisturbanceTerm::Kind::kNoise;
    } else {
      bad_key(path + ".type", "expected constant|payload|impulse|noise");
    }
    t.channel = static_cast<int>(get_num(item, path, "channel", 0));
    if (t.channel < 0 || t.channel > 2) bad_key(path + ".channel", "expected 0, 1 or 2");
    t.magnitude = get_num(item, path, "magnitude", 0.0);
    t.mass_kg = get_num(item, path, "mass_kg", 0.0);
    t.force_n = get_num(item, path, "force_n", 0.0);
    t.lever_m = get_num(item, path, "lever_m", 0.4);
    t.start_s = get_num(item, path, "start_s", 0.0);
    t.duration_s = get_num(item, path, "duration_s", 0.1);
    if (t.duration_s <= 0.0) bad_key(path + ".duration_s", "must be positive");
    t.sigma = get_num(item, path, "sigma", 0.0);
    t.tau_s = get_num(item, path, "tau_s", 0.05);
    t.seed = static_cast<uint64_t>(get_num(item, path, "seed", 0.0));
    s->disturbances.terms.push_back(t);
  }
}

void parse_controller(const json& j, ScenarioSpec* s) {
  check_keys(j, "controller",
             {"variant", "eta", "tau_limit", "beta1", "beta2", "b_z", "kp_joint", "kd_joint",
              "kp_flat", "kd_flat", "ki_dpd", "a_m", "b_m", "gamma", "xi_clip", "td_r",
              "td_vmax", "sigma1", "sigma2", "delta1", "delta2"});
  s->controller_variant = get_str(j, "controller", "variant", s->controller_variant);
  ControllerContext& c = s->controller;
  c.eta = get_num(j, "controller", "eta", c.eta);
  if (c.eta < 0.0 || c.eta > 1.0) bad_key("controller.eta", "must lie in [0, 1]");
  c.tau_limit = get_num(j, "controller", "tau_limit", c.tau_limit);
  c.gains.beta1 = get_num(j, "controller", "beta1", c.gains.beta1);
  c.gains.beta2 = get_num(j, "controller", "beta2", c.gains.beta2);
  c.gains.b_z = get_vec3(j, "controller", "b_z", c.gains.b_z);
  c.gains.kp_joint = get_vec3(j, "controller", "kp_joint", c.gains.kp_joint);
  c.gains.kd_joint = get_vec3(j, "controller", "kd_joint", c.gains.kd_joint);
  c.gains.kp_flat = get_vec3(j, "controller", "kp_flat", c.gains.kp_flat);
  c.gains.kd_flat = get_vec3(j, "controller", "kd_flat", c.gains.kd_flat);
  c.gains.ki_dpd = get_vec3(j, "controller", "ki_dpd", c.gains.ki_dpd);
  c.gains.a_m = get_num(j, "controller", "a_m", c.gains.a_m);
  c.gains.b_m = get_num(j, "controller", "b_m", c.gains.b_m);
  const double gamma = get_num(j, "controller", "gamma", c.gains.gamma_z);
  c.gains.gamma_z = gamma;
  c.gains.gamma_r = gamma;
  c.xi_clip = get_num(j, "controller", "xi_clip", c.xi_clip);
  c.gains.sigma1 = get_vec3(j, "controller", "sigma1", c.gains.sigma1);
  c.gains.sigma2 = get_vec3(j, "controller", "sigma2", c.gains.sigma2);
  c.gains.delta1 = get_vec3(j, "controller", "delta1", c.gains.delta1);
  c.gains.delta2 = get_vec3(j, "controller", "delta2", c.gains.delta2);
  c.td_r = get_vec3(j, "controller", "td_r", c.td_r);
  c.td_vmax = get_vec3(j, "controller", "td_vmax", c.td_vmax);
}

void parse_reference(const json& j, ScenarioSpec* s) {
  check_keys(j, "reference",
             {"kind", "target", "waypoints", "speed", "amplitude", "wavelength", "jump",
              "noise_sigma", "seed", "z_kind", "z_amplitude", "z_time"});
  s->ref_kind = get_str(j, "reference", "kind", s->ref_kind);
  s->ref_target = get_pose(j, "reference", "target", s->ref_target);
  if (j.contains("waypoints")) {
    if (!j["waypoints"].is_array()) bad_key("reference.waypoints", "expected an array");
    s->waypoints.clear();
    for (const auto& w : j["waypoints"]) {
      if (!w.is_array() || w.size() != 3) {
        bad_key("reference.waypoints", "each waypoint is [x, y, theta]");
      }
      s->waypoints.push_back(
          {w[0].get<double>(), w[1].get<double>(), w[2].get<double>()});
    }
  }
  s->ref_params.speed = get_num(j, "reference", "speed", s->ref_params.speed);
  s->ref_params.amplitude = get_num(j, "reference", "amplitude", s->ref_params.amplitude);
  s->ref_params.wavelength = get_num(j, "reference", "wavelength", s->ref_params.wavelength);
  s->ref_params.jump = get_num(j, "reference", "jump", s->ref_params.jump);
  s->ref_params.noise_sigma =
      get_num(j, "reference", "noise_sigma", s->ref_params.noise_sigma);
  s->ref_params.seed =
      static_cast<uint64_t>(get_num(j, "reference", "seed", s->ref_params.seed));
  s->z_ref_kind = get_str(j, "reference", "z_kind", s->z_ref_kind);
  s->z_ref_amplitude = get_num(j, "reference", "z_amplitude", s->z_ref_amplitude);
  s->z_ref_time = get_num(j, "reference", "z_time", s->z_ref_time);
}

}  // namespace

PlannerProblem ScenarioSpec::planner_problem() const {
  PlannerProblem prob =
      PlannerProblem::defaults_for(planner_variant_from_string(planner_variant), model);
  prob.horizon = horizon;
  prob.dt = planner_dt;
  prob.max_iters = max_iters;
  if (!q_weights.empty()) {
    if (static_cast<int>(q_weights.size()) != prob.cost_dim()) {
      throw ConfigError("planner.q: expected " + std::to_string(prob.cost_dim()) +
                        " weights for variant '" + planner_variant + "'");
    }
    prob.q = Eigen::Map<const Eigen::VectorXd>(q_weights.data(), q_weights.size());
  }
  prob.q_terminal = qn_scale * prob.q;
  if (!r_weights.empty()) {
    if (static_cast<int>(r_weights.size()) != prob.input_dim()) {
      throw ConfigError("planner.r: expected " + std::to_string(prob.input_dim()) +
                        " weights for variant '" + planner_variant + "'");
    }
    prob.r_w = Eigen::Map<const Eigen::VectorXd>(r_weights.data(), r_weights.size());
  }
  auto apply_bound = [&](const std::vector<double>& v, Eigen::VectorXd* dst,
                         const char* key) {
    if (v.empty()) return;
    if (static_cast<int>(v.size()) != prob.input_dim()) {
      throw ConfigError(std::string("planner.") + key + ": expected " +
                        std::to_string(prob.input_dim()) + " entries");
    }
    *dst = Eigen::Map<const Eigen::VectorXd>(v.data(), v.size());
  };
  apply_bound(u_min, &prob.u_min, "u_min");
  apply_bound(u_max, &prob.u_max, "u_max");
  return prob;
}

ReferenceProvider ScenarioSpec::reference_provider(const Pose2& initial_cart) const {
  if (ref_kind == "static_pose") return ReferenceProvider::static_pose(ref_target);
  if (ref_kind == "waypoints") return ReferenceProvider::waypoints(waypoints);
  const ReferenceKind kind = reference_kind_from_string(ref_kind);
  return ReferenceProvider::trajectory(
      generate_reference_trajectory(kind, initial_cart, ref_params, duration_s, planner_dt));
}

Eigen::Vector3d ScenarioSpec::z_reference(double t) const {
  Eigen::Vector3d ref = z0;
  if (z_ref_kind == "theta1_step") {
    ref[0] = t >= z_ref_time ? z_ref_amplitude : z0[0];
  } else if (z_ref_kind == "theta1_hold") {
    ref[0] = z_ref_amplitude;
  } else {
    throw ConfigError("reference.z_kind: expected theta1_step|theta1_hold");
  }
  return ref;
}

ScenarioSpec parse_scenario(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    // anchor the message to a line number for the CLI contract
    size_t line = 1;
    for (size_t i = 0; i < e.byte && i < json_text.size(); ++i) {
      if (json_text[i] == '\n') ++line;
    }
    throw ConfigError("line " + std::to_string(line) + ": " + e.what());
  }
  if (!j.is_object()) throw ConfigError("top level: expected an object");
  check_keys(j, "",
             {"name", "seed", "type", "duration_s", "geometry", "model", "planner", "plant",
              "disturbances", "controller", "reference", "success"});

  ScenarioSpec s;
  s.name = get_str(j, "", "name", s.name);
  s.seed = static_cast<uint64_t>(get_num(j, "", "seed", static_cast<double>(s.seed)));
  s.type = get_str(j, "", "type", s.type);
  if (s.type != "planning" && s.type != "control") {
    bad_key("type", "expected planning|control");
  }
  s.duration_s = get_num(j, "", "duration_s", s.duration_s);
  if (s.duration_s <= 0.0) bad_key("duration_s", "must be positive");

  if (j.contains("geometry")) parse_geometry(j["geometry"], &s);
  if (j.contains("model")) parse_model(j["model"], &s);
  if (j.contains("planner")) parse_planner(j["planner"], &s);
  if (j.contains("plant")) parse_plant(j["plant"], &s);
  if (j.contains("disturbances")) parse_disturbances(j["disturbances"], &s);
  if (j.contains("controller")) parse_controller(j["controller"], &s);
  if (j.contains("reference")) parse_reference(j["reference"], &s);
  if (j.contains("success")) {
    check_keys(j["success"], "success", {"position_m", "heading_deg", "control_steady_rad"});
    s.success.position_m = get_num(j["success"], "success", "position_m", s.success.position_m);
    s.success.heading_deg =
        get_num(j["success"], "success", "heading_deg", s.success.heading_deg);
    s.success.control_steady_rad =
        get_num(j["success"], "success", "control_steady_rad", s.success.control_steady_rad);
  }

  s.kinematic.workspace.r_max = std::max(s.kinematic.workspace.r_max, s.model.R);
  s.kinematic.cart_half_link = s.geom.cart_half_link;
  s.controller.geom = s.geom;
  s.controller.handle_width = s.model.L;
  return s;
}

ScenarioSpec load_scenario_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open scenario file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str());
}

std::string scenario_to_json(const ScenarioSpec& s) {
  json j;
  j["name"] = s.name;
  j["seed"] = s.seed;
  j["type"] = s.type;
  j["duration_s"] = s.duration_s;
  j["model"] = {{"R", s.model.R},   {"L", s.model.L},   {"L_c", s.model.L_c},
                {"L1", s.model.L1}, {"L2", s.model.L2}, {"r_L", s.model.r_L},
                {"r_F", s.model.r_F}};
  j["planner"] = {{"variant", s.planner_variant},
                  {"horizon", s.horizon},
                  {"dt", s.planner_dt},
                  {"qn_scale", s.qn_scale},
                  {"max_iters", s.max_iters}};
  j["controller"] = {{"variant", s.controller_variant}, {"eta", s.controller.eta}};
  json ref;
  ref["kind"] = s.ref_kind;
  ref["target"] = {s.ref_target.x, s.ref_target.y, s.ref_target.theta};
  if (!s.waypoints.empty()) {
    json w = json::array();
    for (const Pose2& p : s.waypoints) w.push_back({p.x, p.y, p.theta});
    ref["waypoints"] = w;
  }
  ref["z_kind"] = s.z_ref_kind;
  ref["z_amplitude"] = s.z_ref_amplitude;
  ref["z_time"] = s.z_ref_time;
  ref["seed"] = s.ref_params.seed;
  j["reference"] = ref;
  json dist = json::array();
  for (const DisturbanceTerm& t : s.disturbances.terms) {
    json d;
    switch (t.kind) {
      case DisturbanceTerm::Kind::kConstant:
        d["type"] = "constant";
        d["magnitude"] = t.magnitude;
        break;
      case DisturbanceTerm::Kind::kPayload:
        d["type"] = "payload";
        d["mass_kg"] = t.mass_kg;
        break;
      case DisturbanceTerm::Kind::kImpulse:
        d["type"] = "impulse";
        d["force_n"] = t.force_n;
        d["lever_m"] = t.lever_m;
        d["start_s"] = t.start_s;
        d["duration_s"] = t.duration_s;
        break;
      case DisturbanceTerm::Kind::kNoise:
        d["type"] = "noise";
        d["sigma"] = t.sigma;
        d["tau_s"] = t.tau_s;
        d["seed"] = t.seed;
        break;
    }
    d["channel"] = t.channel;
    dist.push_back(d);
  }
  j["disturbances"] = dist;
  j["success"] = {{"position_m", s.success.position_m},
                  {"heading_deg", s.success.heading_deg},
                  {"control_steady_rad", s.success.control_steady_rad}};
  return j.dump(2) + "\n";
}

}  // namespace cartpush
