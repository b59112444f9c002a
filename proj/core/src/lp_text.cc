#include <fmt/format.h>

#include <istream>
#include <ostream>
#include <sstream>

#include "rra/lp.h"

namespace rra {

namespace {

constexpr std::string_view kHeader = "rra-lp 1";

std::string encode_name(const std::string& name) { return name.empty() ? "-" : name; }
std::string decode_name(const std::string& name) { return name == "-" ? std::string() : name; }

[[noreturn]] void bad_line(std::size_t line_no, const std::string& what) {
  throw Error(ErrorCode::kIoError, fmt::format("lp text line {}: {}", line_no, what));
}

}  // namespace

void write_lp_text(const LinearProgram& lp, std::ostream& out) {
  out << kHeader << '\n';
  out << "sense " << (lp.sense() == ObjectiveSense::kMaximize ? "max" : "min") << '\n';
  for (std::size_t j = 0; j < lp.num_variables(); ++j) {
    const auto& v = lp.variable(j);
    out << fmt::format("var {} {} {} {}\n", j, encode_name(v.name), v.objective,
                       v.nonnegative ? "nonneg" : "free");
  }
  for (std::size_t r = 0; r < lp.num_rows(); ++r) {
    const auto& row = lp.row(r);
    out << fmt::format("row {} {} {} {}\n", r, encode_name(row.name), to_string(row.sense),
                       row.rhs);
  }
  for (std::size_t r = 0; r < lp.num_rows(); ++r)
    for (const auto& e : lp.row(r).entries) out << fmt::format("coef {} {} {}\n", r, e.index, e.value);
}

LinearProgram read_lp_text(std::istream& in) {
  std::string line;
  std::size_t line_no = 1;
  if (!std::getline(in, line) || line != kHeader) bad_line(line_no, "missing header");
  ++line_no;
  if (!std::getline(in, line)) bad_line(line_no, "missing sense");
  ObjectiveSense sense;
  if (line == "sense max") {
    sense = ObjectiveSense::kMaximize;
  } else if (line == "sense min") {
    sense = ObjectiveSense::kMinimize;
  } else {
    bad_line(line_no, "bad sense record");
  }
  LinearProgram lp(sense);
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ss(line);
    std::string kind;
    ss >> kind;
    if (kind == "var") {
      std::size_t idx;
      std::string name, sign;
      double obj;
      if (!(ss >> idx >> name >> obj >> sign)) bad_line(line_no, "malformed var");
      if (idx != lp.num_variables()) bad_line(line_no, "variables must be listed in order");
      if (sign != "nonneg" && sign != "free") bad_line(line_no, "unknown sign " + sign);
      lp.add_variable(obj, sign == "nonneg", decode_name(name));
    } else if (kind == "row") {
      std::size_t idx;
      std::string name, rs;
      double rhs;
      if (!(ss >> idx >> name >> rs >> rhs)) bad_line(line_no, "malformed row");
      if (idx != lp.num_rows()) bad_line(line_no, "rows must be listed in order");
      RowSense s;
      if (rs == "le") s = RowSense::kLessEqual;
      else if (rs == "ge") s = RowSense::kGreaterEqual;
      else if (rs == "eq") s = RowSense::kEqual;
      else bad_line(line_no, "unknown row sense " + rs);
      lp.add_row(s, rhs, decode_name(name));
    } else if (kind == "coef") {
      std::size_t r, j;
      double v;
      if (!(ss >> r >> j >> v)) bad_line(line_no, "malformed coef");
      lp.add_coefficient(r, j, v);
    } else {
      bad_line(line_no, "unknown record " + kind);
    }
  }
  return lp;
}

}  // namespace rra
