#include "manifest.hpp"

#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>
#include <zlib.h>

namespace gridwatch::cli {

namespace {

using nlohmann::json;

[[noreturn]] void bad(const std::string& what) {
  throw ConfigError("manifest: " + what);
}

template <typename T>
T get_or(const json& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    bad(std::string("field '") + key + "' has the wrong type");
  }
}

ToleranceRule rule_from_string(const std::string& name) {
  if (name == "second_max_plus_one") return ToleranceRule::second_max_plus_one;
  if (name == "max_plus_zero") return ToleranceRule::max_plus_zero;
  if (name == "fixed") return ToleranceRule::fixed;
  bad("unknown tolerance_rule '" + name + "'");
}

}  // namespace

Channel channel_from_string(const std::string& name) {
  if (name == "angle") return Channel::angle_active;
  if (name == "voltage") return Channel::voltage_reactive;
  bad("unknown channel '" + name + "' (expected angle or voltage)");
}

const char* channel_prefix(Channel channel) {
  return channel == Channel::angle_active ? "theta_" : "vm_";
}

GridCase Manifest::load_case() const {
  return load_case_file((dir / case_path).string());
}

double Manifest::sigma() const {
  return channel == Channel::voltage_reactive ? sigma_q : sigma_p;
}

ProtocolConfig Manifest::protocol() const {
  ProtocolConfig cfg;
  cfg.eta = eta;
  cfg.window = window;
  cfg.tune_samples = tune_samples;
  cfg.mask_windows = mask_windows;
  cfg.tolerance_windows = tolerance_windows;
  cfg.rule = rule;
  cfg.tolerance = tolerance;
  cfg.stable_pair_mask = stable_pair_mask;
  cfg.sigma_p = sigma();
  cfg.noise_sigma = noise_sigma;
  cfg.channel = channel;
  cfg.fixed_xi = fixed_xi;
  cfg.xi_grid = xi_grid;
  cfg.max_tuned_distance = max_tuned_distance;
  return cfg;
}

Manifest load_manifest(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open manifest " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  const std::string text = buf.str();

  Manifest mf;
  mf.dir = std::filesystem::absolute(path).parent_path();
  mf.crc = static_cast<std::uint32_t>(::crc32(
      0L, reinterpret_cast<const Bytef*>(text.data()),
      static_cast<uInt>(text.size())));

  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    bad(std::string("not valid JSON: ") + e.what());
  }
  if (!j.is_object()) bad("top level must be an object");
  if (!j.contains("case")) bad("missing required field 'case'");
  mf.case_path = get_or<std::string>(j, "case", "");

  mf.channel = channel_from_string(get_or<std::string>(j, "channel", "angle"));
  mf.sigma_p = get_or(j, "sigma_p", mf.sigma_p);
  mf.sigma_q = get_or(j, "sigma_q", mf.sigma_p);
  mf.noise_sigma = get_or(j, "noise_sigma", mf.noise_sigma);
  mf.eta = get_or(j, "eta", mf.eta);
  mf.seed = get_or(j, "seed", mf.seed);
  mf.out_dir = get_or<std::string>(j, "output", mf.out_dir);
  if (mf.sigma_p <= 0.0 || mf.sigma_q <= 0.0) bad("sigma must be positive");
  if (mf.noise_sigma < 0.0) bad("noise_sigma must be nonnegative");
  if (mf.eta < 0) bad("eta must be nonnegative");

  if (j.contains("window")) {
    const json& w = j.at("window");
    if (w.is_number_integer()) {
      mf.window = w.get<int>();
    } else if (w.is_object()) {
      mf.window = get_or(w, "size", mf.window);
      const std::string mode = get_or<std::string>(w, "mode", "sliding");
      if (mode == "sliding")
        mf.window_mode = WindowMode::sliding;
      else if (mode == "growing")
        mf.window_mode = WindowMode::growing;
      else
        bad("unknown window mode '" + mode + "'");
    } else {
      bad("'window' must be a size or an object");
    }
  }
  if (mf.window < 2) bad("window must hold at least two samples");

  if (j.contains("tuning")) {
    const json& t = j.at("tuning");
    if (!t.is_object()) bad("'tuning' must be an object");
    mf.tune_samples = get_or(t, "samples", mf.tune_samples);
    mf.mask_windows = get_or(t, "mask_windows", mf.mask_windows);
    mf.tolerance_windows = get_or(t, "tolerance_windows", mf.tolerance_windows);
    mf.rule = rule_from_string(
        get_or<std::string>(t, "tolerance_rule", "second_max_plus_one"));
    mf.tolerance = get_or(t, "tolerance", mf.tolerance);
    mf.stable_pair_mask = get_or(t, "stable_pair_mask", mf.stable_pair_mask);
    mf.fixed_xi = get_or(t, "xi", mf.fixed_xi);
    mf.xi_grid = get_or(t, "xi_grid", mf.xi_grid);
    mf.max_tuned_distance = get_or(t, "max_distance", mf.max_tuned_distance);
    if (t.contains("xi_grid") && mf.xi_grid.empty())
      bad("'xi_grid' must not be empty");
  }

  if (j.contains("sweep")) {
    const json& s = j.at("sweep");
    if (!s.is_object()) bad("'sweep' must be an object");
    mf.kmin = get_or(s, "kmin", mf.kmin);
    mf.kmax = get_or(s, "kmax", mf.kmax);
    mf.sweep_sizes = get_or(s, "sizes", mf.sweep_sizes);
    mf.sweep_corrupted = get_or(s, "corrupted", mf.sweep_corrupted);
    mf.sweep_reps = get_or(s, "reps", mf.sweep_reps);
    if (mf.kmin < 2 || mf.kmax < mf.kmin) bad("need 2 <= kmin <= kmax");
    if (mf.sweep_sizes.empty()) bad("'sweep.sizes' must not be empty");
    for (double v : mf.sweep_sizes)
      if (v <= 0.0) bad("attack sizes must be positive");
    for (int c : mf.sweep_corrupted)
      if (c < 0) bad("corrupted-sample counts must be nonnegative");
    if (mf.sweep_reps < 1) bad("'sweep.reps' must be at least 1");
  }

  if (j.contains("anomaly")) {
    const json& a = j.at("anomaly");
    if (!a.is_object()) bad("'anomaly' must be an object");
    mf.anomaly_buses = get_or(a, "buses", mf.anomaly_buses);
    mf.anomaly_sizes = get_or(a, "sizes", mf.anomaly_sizes);
    mf.threshold = get_or(a, "threshold", mf.threshold);
    mf.anomaly_corrupted = get_or(a, "corrupted", mf.anomaly_corrupted);
    mf.anomaly_reps = get_or(a, "reps", mf.anomaly_reps);
    if (mf.anomaly_sizes.empty()) bad("'anomaly.sizes' must not be empty");
    for (double v : mf.anomaly_sizes)
      if (v <= 0.0) bad("attack sizes must be positive");
    if (mf.anomaly_reps < 1) bad("'anomaly.reps' must be at least 1");
  }
  return mf;
}

}  // namespace gridwatch::cli
