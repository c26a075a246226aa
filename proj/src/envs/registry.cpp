#include <cstdlib>

#include "apo/common/errors.hpp"
#include "apo/envs/envs.hpp"

namespace apo::envs {

double EnvParams::get(const std::string& key, double fallback) const {
  const auto it = kv.find(key);
  if (it == kv.end()) return fallback;
  char* end = nullptr;
  const double v = std::strtod(it->second.c_str(), &end);
  if (end == it->second.c_str() || *end != '\0')
    throw ConfigError("env parameter '" + key + "' is not a number: " + it->second);
  return v;
}

int EnvParams::get_int(const std::string& key, int fallback) const {
  return static_cast<int>(get(key, fallback));
}

EnvBundle make_env_bundle(const std::string& id, const EnvParams& params) {
  EnvBundle bundle;
  if (id == "chain") {
    const int n = params.get_int("n", 5);
    const double slip = params.get("slip", 0.1);
    const double gamma = params.get("gamma", 0.9);
    const int len = params.get_int("max_episode_len", 100);
    auto mdp = chain_mdp(n, slip, gamma);
    bundle.mdp = mdp;
    bundle.factory = [mdp, len] { return make_tabular_env(mdp, len); };
  } else if (id == "grid") {
    const int w = params.get_int("w", 4);
    const int h = params.get_int("h", 4);
    const int gx = params.get_int("goal_x", w - 1);
    const int gy = params.get_int("goal_y", h - 1);
    const double noise = params.get("noise", 0.1);
    const double gamma = params.get("gamma", 0.9);
    const int len = params.get_int("max_episode_len", 100);
    auto mdp = gridworld(w, h, gx, gy, noise, gamma);
    bundle.mdp = mdp;
    bundle.factory = [mdp, len] { return make_tabular_env(mdp, len); };
  } else if (id == "point_goal") {
    const int len = params.get_int("max_episode_len", 1000);
    bundle.factory = [len] { return make_point_goal(len); };
  } else if (id == "cartpole") {
    const int len = params.get_int("max_episode_len", 1000);
    bundle.factory = [len] { return make_cartpole(len); };
  } else if (id == "pendulum") {
    const int len = params.get_int("max_episode_len", 1000);
    bundle.factory = [len] { return make_pendulum(len); };
  } else {
    throw ConfigError("unknown env id: " + id);
  }
  bundle.descriptor = bundle.factory()->descriptor();
  return bundle;
}

}  // namespace apo::envs
