#include "fsnet/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>

#include "fsnet/error.hpp"

namespace fsnet {

std::string_view to_string(Variant v) {
  switch (v) {
    case Variant::v0: return "V0";
    case Variant::v1: return "V1";
    case Variant::v2: return "V2";
    case Variant::v3: return "V3";
  }
  return "?";
}

std::string_view describe(Variant v) {
  switch (v) {
    case Variant::v0: return "spatial subspace only (baseline)";
    case Variant::v1: return "frequency branch, 1:1 mean fusion";
    case Variant::v2: return "frequency attention, 1:1 mean fusion";
    case Variant::v3: return "adaptive gating fusion";
  }
  return "?";
}

std::string_view to_string(SpatialPool p) { return p == SpatialPool::none ? "none" : "gap"; }

std::string_view to_string(Phase p) {
  switch (p) {
    case Phase::base: return "base";
    case Phase::val: return "val";
    case Phase::novel: return "novel";
  }
  return "?";
}

std::string_view to_string(FusionSpace s) {
  return s == FusionSpace::similarity ? "similarity" : "distance";
}

std::optional<Variant> parse_variant(std::string_view text) {
  if (text == "V0" || text == "v0") return Variant::v0;
  if (text == "V1" || text == "v1") return Variant::v1;
  if (text == "V2" || text == "v2") return Variant::v2;
  if (text == "V3" || text == "v3") return Variant::v3;
  return std::nullopt;
}

std::optional<Phase> parse_phase(std::string_view text) {
  if (text == "base") return Phase::base;
  if (text == "val") return Phase::val;
  if (text == "novel") return Phase::novel;
  return std::nullopt;
}

std::string format_real(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

std::string normalize_key(std::string_view key) {
  std::string k = trim(key);
  while (!k.empty() && k.front() == '-') k.erase(k.begin());
  std::replace(k.begin(), k.end(), '_', '-');
  return k;
}

[[noreturn]] void bad_value(std::string_view key, std::string_view value, std::string_view range) {
  throw ConfigError("config: " + std::string(key) + "=" + std::string(value) +
                    " is invalid; legal range: " + std::string(range));
}

std::uint64_t parse_unsigned(std::string_view key, std::string_view text, std::uint64_t min,
                             std::string_view range) {
  std::uint64_t value = 0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), value);
  if (res.ec != std::errc() || res.ptr != text.data() + text.size() || value < min) {
    bad_value(key, text, range);
  }
  return value;
}

double parse_real(std::string_view key, std::string_view text,
                  const std::function<bool(double)>& ok, std::string_view range) {
  double value = 0.0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), value);
  if (res.ec != std::errc() || res.ptr != text.data() + text.size() || !std::isfinite(value) ||
      !ok(value)) {
    bad_value(key, text, range);
  }
  return value;
}

}  // namespace

const std::vector<std::string>& Config::keys() {
  static const std::vector<std::string> k = {
      "way",     "shot",       "query",        "episodes", "tau",     "lambda", "jitter",
      "epsilon", "seed",       "fusion-space", "spatial-pool", "variant", "d-max",  "reduction",
      "scale",   "lr",         "steps",        "fd-step",  "phase"};
  return k;
}

void Config::set(std::string_view raw_key, std::string_view raw_value) {
  const std::string key = normalize_key(raw_key);
  const std::string text = trim(raw_value);

  if (key == "way") {
    way = parse_unsigned(key, text, 2, "integer >= 2");
  } else if (key == "shot") {
    shot = parse_unsigned(key, text, 1, "integer >= 1");
  } else if (key == "query") {
    query = parse_unsigned(key, text, 1, "integer >= 1");
  } else if (key == "episodes") {
    episodes = parse_unsigned(key, text, 2, "integer >= 2");
  } else if (key == "tau") {
    tau = parse_real(key, text, [](double x) { return x > 0.0 && x < 1.0; }, "real in (0, 1)");
  } else if (key == "lambda") {
    lambda = parse_real(key, text, [](double x) { return x >= 0.0; }, "real >= 0");
  } else if (key == "jitter") {
    jitter = parse_real(key, text, [](double x) { return x >= 0.0; }, "real >= 0");
  } else if (key == "epsilon") {
    epsilon = parse_real(key, text, [](double x) { return x > 0.0; }, "real > 0");
  } else if (key == "seed") {
    seed = parse_unsigned(key, text, 0, "unsigned 64-bit integer");
  } else if (key == "fusion-space") {
    if (text == "similarity") fusion_space = FusionSpace::similarity;
    else if (text == "distance") fusion_space = FusionSpace::distance;
    else bad_value(key, text, "similarity | distance");
  } else if (key == "spatial-pool") {
    if (text == "none") spatial_pool = SpatialPool::none;
    else if (text == "gap") spatial_pool = SpatialPool::gap;
    else bad_value(key, text, "none | gap");
  } else if (key == "variant") {
    const auto v = parse_variant(text);
    if (!v) bad_value(key, text, "V0 | V1 | V2 | V3");
    variant = *v;
  } else if (key == "d-max") {
    d_max = parse_unsigned(key, text, 1, "integer >= 1");
  } else if (key == "reduction") {
    reduction = parse_unsigned(key, text, 1, "integer >= 1 dividing the channel count");
  } else if (key == "scale") {
    logit_scale = parse_real(key, text, [](double x) { return x > 0.0; }, "real > 0");
  } else if (key == "lr") {
    lr = parse_real(key, text, [](double x) { return x >= 0.0; }, "real >= 0");
  } else if (key == "steps") {
    steps = parse_unsigned(key, text, 0, "integer >= 0");
  } else if (key == "fd-step") {
    fd_step = parse_real(key, text, [](double x) { return x > 0.0; }, "real > 0");
  } else if (key == "phase") {
    const auto p = parse_phase(text);
    if (!p) bad_value(key, text, "base | val | novel");
    phase = *p;
  } else {
    throw ConfigError("config: unknown key '" + std::string(raw_key) + "'");
  }
}

void Config::merge_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open " + path.string());
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config: " + path.string() + ":" + std::to_string(lineno) +
                        ": expected key=value");
    }
    set(std::string_view(t).substr(0, eq), std::string_view(t).substr(eq + 1));
  }
}

std::vector<std::pair<std::string, std::string>> Config::entries() const {
  return {
      {"way", std::to_string(way)},
      {"shot", std::to_string(shot)},
      {"query", std::to_string(query)},
      {"episodes", std::to_string(episodes)},
      {"tau", format_real(tau)},
      {"lambda", format_real(lambda)},
      {"jitter", format_real(jitter)},
      {"epsilon", format_real(epsilon)},
      {"seed", std::to_string(seed)},
      {"fusion-space", std::string(to_string(fusion_space))},
      {"spatial-pool", std::string(to_string(spatial_pool))},
      {"variant", std::string(to_string(variant))},
      {"d-max", std::to_string(d_max)},
      {"reduction", std::to_string(reduction)},
      {"scale", format_real(logit_scale)},
      {"lr", format_real(lr)},
      {"steps", std::to_string(steps)},
      {"fd-step", format_real(fd_step)},
      {"phase", std::string(to_string(phase))},
  };
}

}  // namespace fsnet
