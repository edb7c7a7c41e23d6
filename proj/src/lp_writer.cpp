#include <cmath>
#include <sstream>

#include "pipesched/solver.hpp"
#include "pipesched/util.hpp"

namespace pipesched {

namespace {

const char* prefix(VarKind kind) {
  switch (kind) {
    case VarKind::placement: return "v";
    case VarKind::endpoint: return "w";
    case VarKind::occupancy_upper: return "cu";
    case VarKind::occupancy_lower: return "cl";
    case VarKind::distribution_deviation: return "d";
  }
  return "x";
}

// Writes " + 3 v1 - 2 v7" with a line break every few terms; CPLEX-style
// readers dislike very long lines.
void write_terms(std::ostringstream& out, const MILPModel& model, const std::vector<Term>& terms) {
  std::size_t n = 0;
  for (const auto& t : terms) {
    if (n > 0 && n % 8 == 0) out << "\n   ";
    out << (t.coef < 0 ? " - " : " + ") << format_number(std::abs(t.coef)) << ' ' << variable_name(model, t.var);
    ++n;
  }
}

bool trivially_satisfied(const LinearConstraint& row) {
  switch (row.sense) {
    case Sense::le: return 0.0 <= row.rhs;
    case Sense::ge: return 0.0 >= row.rhs;
    case Sense::eq: return row.rhs == 0.0;
  }
  return true;
}

}  // namespace

std::string variable_name(const MILPModel& model, VarId id) {
  return std::string(prefix(model.vars.at(id).kind)) + std::to_string(id);
}

std::string write_lp(const MILPModel& model) {
  std::ostringstream out;
  out << "\\ pipesched model " << model.metadata.instance_hash << "\n";
  out << "Maximize\n obj:";
  if (model.objective.terms.empty()) {
    if (model.vars.size() > 0) out << " 0 " << variable_name(model, 0);
  } else {
    write_terms(out, model, model.objective.terms);
  }
  out << "\nSubject To\n";
  for (std::size_t i = 0; i < model.constraints.size(); ++i) {
    const auto& row = model.constraints[i];
    if (row.lazy) continue;
    if (row.terms.empty()) {
      if (trivially_satisfied(row)) continue;
      if (model.vars.size() == 0) throw ModelError("infeasible empty row in a model without variables");
      // Keep the contradiction visible to the solver.
      out << ' ' << family_name(row.family) << '_' << i << ": 0 " << variable_name(model, 0);
    } else {
      out << ' ' << family_name(row.family) << '_' << i << ':';
      write_terms(out, model, row.terms);
    }
    out << (row.sense == Sense::le ? " <= " : row.sense == Sense::ge ? " >= " : " = ") << format_number(row.rhs)
        << '\n';
  }
  out << "Bounds\n";
  for (VarId id = 0; id < model.vars.size(); ++id) {
    const auto& v = model.vars.at(id);
    if (v.binary) continue;
    const auto name = variable_name(model, id);
    const bool free_low = std::isinf(v.lower) && v.lower < 0;
    const bool free_up = std::isinf(v.upper);
    if (free_low && free_up) {
      out << ' ' << name << " free\n";
    } else if (free_low) {
      out << " -inf <= " << name << " <= " << format_number(v.upper) << '\n';
    } else if (!free_up || v.lower != 0.0) {
      out << ' ' << format_number(v.lower) << " <= " << name << " <= " << (free_up ? "+inf" : format_number(v.upper))
          << '\n';
    }
  }
  out << "Binaries\n";
  for (VarId id = 0; id < model.vars.size(); ++id)
    if (model.vars.at(id).binary) out << ' ' << variable_name(model, id) << '\n';
  out << "End\n";
  return out.str();
}

}  // namespace pipesched
