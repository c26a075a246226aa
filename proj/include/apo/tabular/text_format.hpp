#pragma once

#include <iosfwd>
#include <string>

#include "apo/tabular/mdp.hpp"

namespace apo::tabular {

/// Line-oriented MDP description:
///
///   mdp <n_states> <n_actions> <gamma>
///   mu <s> <p>
///   t <s> <a> <s'> <prob> <reward>
///
/// Unlisted transitions are zero.  '#' starts a comment.  Rows whose
/// transition probabilities do not sum to one are rejected.
TabularMdp parse_mdp_text(std::istream& in);
TabularMdp load_mdp_file(const std::string& path);
void write_mdp_text(const TabularMdp& mdp, std::ostream& out);

}  // namespace apo::tabular
