// Copyright 2026 The vpctl Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <vector>

namespace vpctl {

// One verification line: measured value against its threshold.
struct CheckResult {
  std::string name;
  bool pass = false;
  double measured = 0.0;
  double threshold = 0.0;
  std::string detail;
};

struct RunReport {
  std::string command;
  std::string config_digest;
  std::vector<CheckResult> checks;
  double elapsed_seconds = 0.0;

  bool all_pass() const;
  void add(const std::string& name, bool pass, double measured, double threshold,
           const std::string& detail = "");
  std::string to_json() const;
  // one line per check on stdout
  void print() const;
  void save(const std::string& path) const;
};

}  // namespace vpctl
