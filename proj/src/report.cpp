// Copyright 2026 The vpctl Authors
// SPDX-License-Identifier: Apache-2.0
#include "vpctl/report.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>

#include "json.hpp"

namespace vpctl {

bool RunReport::all_pass() const {
  for (const auto& c : checks)
    if (!c.pass) return false;
  return true;
}

void RunReport::add(const std::string& name, bool pass, double measured, double threshold,
                    const std::string& detail) {
  checks.push_back({name, pass, measured, threshold, detail});
}

std::string RunReport::to_json() const {
  nlohmann::json j;
  j["command"] = command;
  j["config_digest"] = config_digest;
  j["elapsed_seconds"] = elapsed_seconds;
  j["all_pass"] = all_pass();
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& c : checks) {
    nlohmann::json e;
    e["name"] = c.name;
    e["pass"] = c.pass;
    e["measured"] = c.measured;
    e["threshold"] = c.threshold;
    e["detail"] = c.detail;
    arr.push_back(e);
  }
  j["checks"] = arr;
  return j.dump(2);
}

void RunReport::print() const {
  for (const auto& c : checks) {
    std::printf("[%s] %-42s measured=%-12.5g threshold=%-12.5g %s\n", c.pass ? "PASS" : "FAIL",
                c.name.c_str(), c.measured, c.threshold, c.detail.c_str());
  }
}

void RunReport::save(const std::string& path) const {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot open " + path);
  f << to_json();
}

}  // namespace vpctl
