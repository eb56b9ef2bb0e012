#pragma once

// Figure presets: each is a base scenario plus the list of curves to run.

#include <algorithm>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "herdsim/chain.hpp"

namespace herdsim {

struct Curve {
  std::string label;               // file-name safe
  std::optional<double> p_bias;    // nullopt for the principal-free baseline
  std::optional<double> p_trust;
};

struct Preset {
  std::string name;
  Scenario base;
  std::vector<Curve> curves;
  std::string narrated;  // label of the curve the figure text describes, if any
};

inline const std::vector<double>& preset_grid() {
  static const std::vector<double> grid{0.1, 0.3, 0.5, 0.7, 0.9};
  return grid;
}

inline std::string curve_label(double p_bias, double p_trust) {
  auto fmt = [](double v) {
    std::string s = std::to_string(v);
    s.erase(s.find_last_not_of('0') + 1);
    if (!s.empty() && s.back() == '.') s.pop_back();
    return s;
  };
  return "pb" + fmt(p_bias) + "_pt" + fmt(p_trust);
}

inline Curve baseline_curve() { return {"no-principal", std::nullopt, std::nullopt}; }

inline const std::vector<std::string>& preset_names() {
  static const std::vector<std::string> names{"fig1", "fig2", "fig3", "fig4", "long-horizon"};
  return names;
}

/// Returns the named preset on top of `base` (model constants, M, seed),
/// or nullopt for an unknown name. The preset fixes T: 100 for fig1/fig2,
/// 200 for fig3/fig4 so the late-t trust effects are visible, and 1000 for
/// long-horizon.
inline std::optional<Preset> find_preset(std::string_view name, Scenario base = {}) {
  Preset p;
  p.name = std::string(name);
  p.base = base;
  p.base.metric = Metric::Both;
  p.base.T = 100;
  if (name == "fig1") {
    p.curves.push_back(baseline_curve());
  } else if (name == "fig2") {
    for (double pb : preset_grid()) p.curves.push_back({curve_label(pb, 1.0), pb, 1.0});
    p.curves.push_back(baseline_curve());
  } else if (name == "fig3") {
    p.base.T = 200;
    for (double pt : preset_grid()) p.curves.push_back({curve_label(0.3, pt), 0.3, pt});
    p.narrated = curve_label(0.3, 0.1);
  } else if (name == "fig4") {
    p.base.T = 200;
    for (double pt : preset_grid()) p.curves.push_back({curve_label(0.5, pt), 0.5, pt});
  } else if (name == "long-horizon") {
    p.base.T = 1000;
    p.curves.push_back({curve_label(0.5, 1.0), 0.5, 1.0});
  } else {
    return std::nullopt;
  }
  return p;
}

inline Scenario curve_scenario(const Preset& preset, const Curve& curve) {
  Scenario s = preset.base;
  s.principal.enabled = curve.p_bias.has_value();
  if (curve.p_bias) s.principal.p_bias = *curve.p_bias;
  if (curve.p_trust) s.principal.p_trust = *curve.p_trust;
  return s;
}

}  // namespace herdsim
