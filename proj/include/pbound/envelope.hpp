#pragma once

// JSON envelope written by every CLI command.

#include <string>

#include "json.hpp"
#include "pbound/bound.hpp"

namespace pbound {

#ifndef PBOUND_VERSION
#define PBOUND_VERSION "0.1.0"
#endif

inline constexpr const char* kToolVersion = PBOUND_VERSION;

struct ConstantsUsed {
  double u_star = 0.0;
  double m_star = 0.0;
  double tolerance = 0.0;

  bool operator==(const ConstantsUsed&) const = default;
};

struct OutputEnvelope {
  std::string command;
  nlohmann::json inputs = nlohmann::json::object();
  nlohmann::json results = nlohmann::json::object();
  ConstantsUsed constants_used;
  std::string tool_version = kToolVersion;

  bool operator==(const OutputEnvelope&) const = default;
};

inline void to_json(nlohmann::json& j, const ConstantsUsed& c) {
  j = nlohmann::json{{"u_star", c.u_star}, {"m_star", c.m_star}, {"tolerance", c.tolerance}};
}

inline void from_json(const nlohmann::json& j, ConstantsUsed& c) {
  j.at("u_star").get_to(c.u_star);
  j.at("m_star").get_to(c.m_star);
  j.at("tolerance").get_to(c.tolerance);
}

inline void to_json(nlohmann::json& j, const OutputEnvelope& e) {
  j = nlohmann::json{{"command", e.command},
                     {"inputs", e.inputs},
                     {"results", e.results},
                     {"constants_used", e.constants_used},
                     {"tool_version", e.tool_version}};
}

inline void from_json(const nlohmann::json& j, OutputEnvelope& e) {
  j.at("command").get_to(e.command);
  e.inputs = j.at("inputs");
  e.results = j.at("results");
  j.at("constants_used").get_to(e.constants_used);
  j.at("tool_version").get_to(e.tool_version);
}

inline void to_json(nlohmann::json& j, const BoundReport& r) {
  j = nlohmann::json{{"input_descriptor", r.input_descriptor},
                     {"sigma_value", r.sigma_value},
                     {"argmax_index", r.argmax_index},
                     {"max_product", r.max_product},
                     {"margin", r.margin},
                     {"m_used", r.m_used}};
}

inline void from_json(const nlohmann::json& j, BoundReport& r) {
  j.at("input_descriptor").get_to(r.input_descriptor);
  j.at("sigma_value").get_to(r.sigma_value);
  j.at("argmax_index").get_to(r.argmax_index);
  j.at("max_product").get_to(r.max_product);
  j.at("margin").get_to(r.margin);
  j.at("m_used").get_to(r.m_used);
}

// nlohmann::json prints doubles in the shortest form that parses back to the
// same value, so dump/parse is lossless.
inline std::string serialize(const OutputEnvelope& e, int indent = 2) {
  return nlohmann::json(e).dump(indent);
}

inline OutputEnvelope parse_envelope(const std::string& text) {
  return nlohmann::json::parse(text).get<OutputEnvelope>();
}

}  // namespace pbound
