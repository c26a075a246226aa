#include "apo/tabular/text_format.hpp"

#include <fstream>
#include <sstream>
#include <string>

#include "apo/common/errors.hpp"

namespace apo::tabular {

namespace {

[[noreturn]] void fail(int line, const std::string& msg) {
  throw ConfigError("mdp text line " + std::to_string(line) + ": " + msg);
}

}  // namespace

TabularMdp parse_mdp_text(std::istream& in) {
  TabularMdp mdp;
  bool have_header = false;
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const auto hash = raw.find('#');
    if (hash != std::string::npos) raw.erase(hash);
    std::istringstream line(raw);
    std::string tag;
    if (!(line >> tag)) continue;
    if (tag == "mdp") {
      if (have_header) fail(line_no, "duplicate header");
      if (!(line >> mdp.n_states >> mdp.n_actions >> mdp.gamma))
        fail(line_no, "expected 'mdp <n_states> <n_actions> <gamma>'");
      if (mdp.n_states < 1 || mdp.n_actions < 1)
        fail(line_no, "state and action counts must be positive");
      if (!(mdp.gamma >= 0.0 && mdp.gamma < 1.0))
        fail(line_no, "gamma must lie in [0, 1)");
      mdp.trans.assign(mdp.n_actions,
                       Eigen::MatrixXd::Zero(mdp.n_states, mdp.n_states));
      mdp.reward.assign(mdp.n_actions,
                        Eigen::MatrixXd::Zero(mdp.n_states, mdp.n_states));
      mdp.init_dist = Eigen::VectorXd::Zero(mdp.n_states);
      have_header = true;
    } else if (tag == "mu") {
      if (!have_header) fail(line_no, "'mu' before header");
      int s;
      double p;
      if (!(line >> s >> p)) fail(line_no, "expected 'mu <s> <p>'");
      if (s < 0 || s >= mdp.n_states) fail(line_no, "state out of range");
      mdp.init_dist[s] = p;
    } else if (tag == "t") {
      if (!have_header) fail(line_no, "'t' before header");
      int s, a, sp;
      double p, r;
      if (!(line >> s >> a >> sp >> p >> r))
        fail(line_no, "expected 't <s> <a> <s'> <prob> <reward>'");
      if (s < 0 || s >= mdp.n_states || sp < 0 || sp >= mdp.n_states)
        fail(line_no, "state out of range");
      if (a < 0 || a >= mdp.n_actions) fail(line_no, "action out of range");
      mdp.trans[a](s, sp) = p;
      mdp.reward[a](s, sp) = r;
    } else {
      fail(line_no, "unknown tag '" + tag + "'");
    }
  }
  if (!have_header) throw ConfigError("mdp text: missing 'mdp' header");
  try {
    mdp.validate();
  } catch (const InvalidMdp& e) {
    throw ConfigError(std::string("mdp text: ") + e.what());
  }
  return mdp;
}

TabularMdp load_mdp_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open mdp file: " + path);
  return parse_mdp_text(in);
}

void write_mdp_text(const TabularMdp& mdp, std::ostream& out) {
  out << "mdp " << mdp.n_states << " " << mdp.n_actions << " " << mdp.gamma
      << "\n";
  out.precision(17);
  for (int s = 0; s < mdp.n_states; ++s)
    if (mdp.init_dist[s] != 0.0) out << "mu " << s << " " << mdp.init_dist[s] << "\n";
  for (int a = 0; a < mdp.n_actions; ++a)
    for (int s = 0; s < mdp.n_states; ++s)
      for (int sp = 0; sp < mdp.n_states; ++sp)
        if (mdp.trans[a](s, sp) != 0.0)
          out << "t " << s << " " << a << " " << sp << " " << mdp.trans[a](s, sp)
              << " " << mdp.reward[a](s, sp) << "\n";
}

}  // namespace apo::tabular
