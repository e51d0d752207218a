#include "refsyn/error.hpp"
#include "refsyn/fts.hpp"

#include <algorithm>
#include <istream>
#include <ostream>
#include <sstream>

namespace refsyn {

void write_fts(std::ostream &out, const Fts &fts) {
  out << "fts " << fts.state_bound() << ' ' << fts.action_count() << '\n';
  std::vector<StateId> dead;
  for (StateId q = 0; q < fts.state_bound(); ++q)
    if (!fts.is_live(q))
      dead.push_back(q);
  if (!dead.empty()) {
    out << "dead";
    for (auto q : dead)
      out << ' ' << q;
    out << '\n';
  }
  auto triples = fts.list().triples();
  std::sort(triples.begin(), triples.end());
  for (const auto &t : triples)
    out << t.from << ' ' << t.action << ' ' << t.to << '\n';
  for (const auto &name : fts.propositions()) {
    out << "label " << name << '\n';
    const auto ids = fts.label(name).to_ids();
    for (std::size_t i = 0; i < ids.size(); ++i)
      out << ids[i] << ((i + 1) % 16 == 0 || i + 1 == ids.size() ? '\n' : ' ');
    out << "end\n";
  }
}

namespace {

[[noreturn]] void parse_error(std::size_t line, const std::string &msg) {
  throw ConfigError("fts line " + std::to_string(line) + ": " + msg);
}

} // namespace

Fts read_fts(std::istream &in) {
  std::string line;
  std::size_t lineno = 0;
  auto next_line = [&]() -> bool {
    while (std::getline(in, line)) {
      ++lineno;
      const auto first = line.find_first_not_of(" \t\r");
      if (first == std::string::npos || line[first] == '#')
        continue;
      return true;
    }
    return false;
  };

  if (!next_line())
    throw ConfigError("fts: empty input");
  std::istringstream header(line);
  std::string tag;
  std::size_t bound = 0, n_actions = 0;
  if (!(header >> tag >> bound >> n_actions) || tag != "fts")
    parse_error(lineno, "expected 'fts <states> <actions>'");
  if (n_actions == 0)
    parse_error(lineno, "at least one action is required");

  Fts fts(n_actions);
  for (std::size_t i = 0; i < bound; ++i)
    fts.add_state();

  std::vector<StateId> dead;
  std::vector<Transition> transitions;
  std::vector<std::pair<std::string, std::vector<StateId>>> labels;

  while (next_line()) {
    std::istringstream ls(line);
    std::string word;
    ls >> word;
    if (word == "dead") {
      StateId q;
      while (ls >> q)
        dead.push_back(q);
    } else if (word == "label") {
      std::string name;
      if (!(ls >> name))
        parse_error(lineno, "label needs a name");
      std::vector<StateId> ids;
      bool closed = false;
      while (next_line()) {
        std::istringstream ids_line(line);
        std::string tok;
        while (ids_line >> tok) {
          if (tok == "end") {
            closed = true;
            break;
          }
          try {
            ids.push_back(static_cast<StateId>(std::stoul(tok)));
          } catch (const std::exception &) {
            parse_error(lineno, "bad state id '" + tok + "'");
          }
        }
        if (closed)
          break;
      }
      if (!closed)
        parse_error(lineno, "label block '" + name + "' has no 'end'");
      labels.emplace_back(name, std::move(ids));
    } else {
      std::istringstream ts(line);
      Transition t{};
      std::string extra;
      if (!(ts >> t.from >> t.action >> t.to) || (ts >> extra))
        parse_error(lineno, "expected 'q u q_next'");
      transitions.push_back(t);
    }
  }

  // remove from the top down so lower ids keep their place
  std::sort(dead.rbegin(), dead.rend());
  for (StateId q : dead) {
    if (q >= bound)
      throw ConfigError("fts: dead state " + std::to_string(q) +
                        " outside the declared bound");
    if (fts.is_live(q))
      fts.remove_state(q);
  }
  try {
    for (const auto &t : transitions)
      fts.add_transition(t);
    for (const auto &[name, ids] : labels) {
      fts.define_label(name);
      for (StateId q : ids)
        fts.set_label(name, q);
    }
  } catch (const UsageError &e) {
    throw ConfigError(std::string("fts: ") + e.what());
  }
  return fts;
}

} // namespace refsyn
