#include "powersat/stimulus.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "powersat/error.hpp"

namespace powersat {

using nlohmann::json;

namespace {

double rate_field(const json& entry, const char* key, double fallback, const std::string& port) {
  if (!entry.contains(key)) return fallback;
  const json& v = entry.at(key);
  if (!v.is_number()) throw StimulusError("input '" + port + "': " + key + " must be a number");
  double r = v.get<double>();
  if (!(r >= 0.0 && r <= 1.0)) throw StimulusError("input '" + port + "': " + key + " must lie in [0, 1]");
  return r;
}

std::uint64_t vector_value(const json& v, const std::string& port) {
  if (v.is_number_unsigned()) return v.get<std::uint64_t>();
  if (v.is_number_integer() && v.get<std::int64_t>() >= 0) return static_cast<std::uint64_t>(v.get<std::int64_t>());
  if (v.is_string()) {
    if (auto parsed = parse_unsigned(v.get<std::string>())) return *parsed;
  }
  throw StimulusError("input '" + port + "': malformed vector entry " + v.dump());
}

std::string hex(std::uint64_t v) {
  std::ostringstream os;
  os << "0x" << std::hex << v;
  return os.str();
}

}  // namespace

StimulusConfig parse_stimulus_config(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw StimulusError(std::string("stimuli config is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw StimulusError("stimuli config must be a JSON object");

  StimulusConfig cfg;
  if (!doc.contains("cycles") || !doc["cycles"].is_number_unsigned() || doc["cycles"].get<std::uint64_t>() == 0) {
    throw StimulusError("stimuli config needs a positive integer \"cycles\"");
  }
  cfg.cycles = doc["cycles"].get<std::size_t>();
  if (doc.contains("seed")) {
    if (!doc["seed"].is_number_unsigned()) throw StimulusError("\"seed\" must be an unsigned integer");
    cfg.seed = doc["seed"].get<std::uint64_t>();
  }
  if (doc.contains("inputs")) {
    const json& inputs = doc["inputs"];
    if (!inputs.is_object()) throw StimulusError("\"inputs\" must be an object");
    for (const auto& [port, entry] : inputs.items()) {
      if (!entry.is_object()) throw StimulusError("input '" + port + "': entry must be an object");
      PortStimulus ps;
      if (entry.contains("vectors")) {
        const json& vs = entry["vectors"];
        if (!vs.is_array()) throw StimulusError("input '" + port + "': \"vectors\" must be an array");
        std::vector<std::uint64_t> values;
        values.reserve(vs.size());
        for (const auto& v : vs) values.push_back(vector_value(v, port));
        if (values.size() != cfg.cycles) {
          throw StimulusError("input '" + port + "': " + std::to_string(values.size()) + " vectors for " +
                              std::to_string(cfg.cycles) + " cycles");
        }
        ps.vectors = std::move(values);
      } else {
        if (!entry.contains("toggle_rate")) throw StimulusError("input '" + port + "': missing \"toggle_rate\"");
        ps.toggle_rate = rate_field(entry, "toggle_rate", 0.0, port);
        ps.static_probability = rate_field(entry, "initial_static_probability", 0.5, port);
      }
      cfg.inputs.emplace(port, std::move(ps));
    }
  }
  if (doc.contains("area_model")) {
    const json& am = doc["area_model"];
    if (!am.is_object()) throw StimulusError("\"area_model\" must be an object");
    for (const auto& [op, k] : am.items()) {
      if (!k.is_number() || k.get<double>() < 0) {
        throw StimulusError("area_model '" + op + "': multiplier must be a nonnegative number");
      }
      cfg.area_model[op] = k.get<double>();
    }
  }
  return cfg;
}

StimulusConfig load_stimulus_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw StimulusError("cannot open stimuli config '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_stimulus_config(buf.str());
}

std::string stimulus_config_json(const StimulusConfig& cfg) {
  json doc;
  doc["cycles"] = cfg.cycles;
  doc["seed"] = cfg.seed;
  json inputs = json::object();
  for (const auto& [port, ps] : cfg.inputs) {
    json entry;
    if (ps.vectors) {
      json vs = json::array();
      for (std::uint64_t v : *ps.vectors) vs.push_back(hex(v));
      entry["vectors"] = std::move(vs);
    } else {
      entry["toggle_rate"] = ps.toggle_rate;
      entry["initial_static_probability"] = ps.static_probability;
    }
    inputs[port] = std::move(entry);
  }
  doc["inputs"] = std::move(inputs);
  if (!cfg.area_model.empty()) doc["area_model"] = cfg.area_model;
  return doc.dump(2) + "\n";
}

StimulusConfig explicit_config(const Stimuli& stimuli, std::uint64_t seed) {
  StimulusConfig cfg;
  cfg.seed = seed;
  for (const auto& [port, w] : stimuli) {
    cfg.cycles = w.cycles();
    PortStimulus ps;
    ps.vectors = w.values;
    cfg.inputs.emplace(port, std::move(ps));
  }
  return cfg;
}

std::uint64_t splitmix64_next(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::uint64_t splitmix64(std::uint64_t x) { return splitmix64_next(x); }

namespace {

// Exactly u / 2^64 < p: p * 2^64 is exact in a double, and for an integer u
// the comparison against a real threshold t equals u < ceil(t).
bool draw_below(std::uint64_t u, double p) {
  if (p <= 0.0) return false;
  const double t = p * 0x1.0p64;
  if (t >= 0x1.0p64) return true;
  return u < static_cast<std::uint64_t>(std::ceil(t));
}

Waveform random_waveform(const StimulusConfig& cfg, const std::string& port, std::uint32_t width,
                         const PortStimulus& ps) {
  Waveform w{width, std::vector<std::uint64_t>(cfg.cycles, 0)};
  const std::uint64_t name_hash = fnv1a64(port);
  for (std::uint32_t b = 0; b < width; ++b) {
    std::uint64_t state = splitmix64(cfg.seed ^ name_hash ^ (std::uint64_t{b} * 0x9E3779B97F4A7C15ULL));
    std::uint64_t bit = draw_below(splitmix64_next(state), ps.static_probability) ? 1 : 0;
    w.values[0] |= bit << b;
    for (std::size_t i = 1; i < cfg.cycles; ++i) {
      if (draw_below(splitmix64_next(state), ps.toggle_rate)) bit ^= 1;
      w.values[i] |= bit << b;
    }
  }
  return w;
}

}  // namespace

Stimuli generate_stimuli(const StimulusConfig& cfg, const Design& d) {
  if (cfg.cycles == 0) throw StimulusError("stimuli config needs at least one cycle");
  for (const auto& [port, ps] : cfg.inputs) {
    bool known = false;
    for (const auto& in : d.inputs) known = known || in.name == port;
    if (!known) throw StimulusError("stimuli config names unknown input '" + port + "'");
  }
  Stimuli out;
  for (const Port& in : d.inputs) {
    auto it = cfg.inputs.find(in.name);
    if (it == cfg.inputs.end()) throw StimulusError("no stimulus for input '" + in.name + "'");
    const PortStimulus& ps = it->second;
    if (ps.vectors) {
      if (ps.vectors->size() != cfg.cycles) {
        throw StimulusError("input '" + in.name + "': " + std::to_string(ps.vectors->size()) + " vectors for " +
                            std::to_string(cfg.cycles) + " cycles");
      }
      for (std::uint64_t v : *ps.vectors) {
        if ((v & ~width_mask(in.width)) != 0) {
          throw StimulusError("input '" + in.name + "': vector " + hex(v) + " exceeds width " +
                              std::to_string(in.width));
        }
      }
      out.emplace(in.name, Waveform{in.width, *ps.vectors});
    } else {
      out.emplace(in.name, random_waveform(cfg, in.name, in.width, ps));
    }
  }
  return out;
}

}  // namespace powersat
