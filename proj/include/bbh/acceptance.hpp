#pragma once

#include <iosfwd>
#include <set>
#include <string>
#include <vector>

#include "bbh/concrete.hpp"
#include "bbh/equivariant.hpp"

namespace bbh {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool pass = false;
  std::string detail;
  double seconds = 0;
};

struct AcceptOptions {
  int workers = 1;
  std::set<int> only;  // empty = all nine
  std::string archive_dir;  // when set, criterion 8 averages are written there
};

/// Runs the acceptance criteria in order, printing one `PASS`/`FAIL` line per
/// criterion to `os` as it finishes.
std::vector<CriterionResult> run_acceptance(const AcceptOptions& opt, std::ostream& os);

struct NamedGroup {
  std::string name;
  ConcreteGroup group;
  Involution sigma;
};

/// Every group with involution the acceptance suite constructs: catalog groups,
/// enumerated quotient classes, sampled quotients, fiber subgroups and squares.
std::vector<NamedGroup> structural_corpus(const Caps& caps = {});

}  // namespace bbh
