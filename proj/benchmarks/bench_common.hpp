// Copyright 2026 The blockdvfs Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>

#include "blockdvfs/device.hpp"
#include "blockdvfs/graph.hpp"

namespace bench {

inline const blockdvfs::DeviceProfile& profile() {
  static const auto p =
      blockdvfs::load_profile(std::string(BLOCKDVFS_DATA_DIR) + "/profiles/orin_nano.json");
  return p;
}

inline blockdvfs::ComputationGraph fixture(const std::string& name) {
  return blockdvfs::load_graph(std::string(BLOCKDVFS_DATA_DIR) + "/graphs/" + name + ".json");
}

}  // namespace bench
