#pragma once

#include <string>

#include "apo/net/dist.hpp"

namespace apo::net {

/// Binary checkpoint, all integers and doubles little-endian:
///
///   bytes 0..3   magic "APO1"
///   u32          version (1)
///   u32          family (0 categorical, 1 diagonal gaussian)
///   u32          input_dim
///   u32          action_dim
///   u32          hidden layer count, then u32 per layer width
///   u64          parameter count
///   f64[]        flat parameters in layout order
struct Checkpoint {
  PolicySpec spec;
  ParamVector params;
};

void save_checkpoint(const std::string& path, const Checkpoint& ckpt);
Checkpoint load_checkpoint(const std::string& path);

}  // namespace apo::net
