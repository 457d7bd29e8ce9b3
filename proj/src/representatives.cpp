#include "lfg/representatives.hpp"

#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

namespace lfg {

void write_representatives(std::ostream& out, const RepresentativeSet& reps) {
  out << "# factor\trank\titem_id\tscore\tpop_norm\trel_norm\tspec_norm\n";
  const auto old_precision = out.precision(17);
  for (const auto& fr : reps.factors) {
    int rank = 0;
    for (const auto& e : fr.entries)
      out << fr.factor << '\t' << ++rank << '\t' << e.item_id << '\t' << e.score << '\t' << e.pop_norm << '\t'
          << e.rel_norm << '\t' << e.spec_norm << '\n';
  }
  out.precision(old_precision);
}

RepresentativeSet read_representatives(std::istream& in, const IdMap* items) {
  RepresentativeSet reps;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line.front() == '#') continue;
    std::istringstream fields(line);
    Eigen::Index factor = 0;
    int rank = 0;
    RepresentativeEntry e;
    if (!(fields >> factor >> rank >> e.item_id >> e.score >> e.pop_norm >> e.rel_norm >> e.spec_norm) || factor < 0)
      throw Error("bad_representatives", "line " + std::to_string(line_no) + ": malformed representative record");
    if (items) {
      auto idx = items->find(e.item_id);
      if (!idx) throw Error("bad_representatives", "line " + std::to_string(line_no) + ": unknown item");
      e.item = *idx;
    }
    while (reps.factor_count() <= factor) {
      reps.factors.emplace_back();
      reps.factors.back().factor = reps.factor_count() - 1;
    }
    auto& fr = reps.factors[static_cast<std::size_t>(factor)];
    if (static_cast<std::size_t>(rank) != fr.entries.size() + 1)
      throw Error("bad_representatives", "line " + std::to_string(line_no) + ": ranks out of order");
    fr.entries.push_back(e);
    fr.pool_size = fr.entries.size();
  }
  return reps;
}

}  // namespace lfg
