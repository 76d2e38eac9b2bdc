#include "relusat/spec_io.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <map>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

namespace relusat {

using json = nlohmann::json;

ParseError::ParseError(std::size_t line, const std::string& what)
    : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}

std::string_view to_string(Cmp op) {
  switch (op) {
  case Cmp::le: return "<=";
  case Cmp::ge: return ">=";
  case Cmp::lt: return "<";
  case Cmp::gt: return ">";
  }
  return "?";
}

double LinearConstraint::slack(const Eigen::VectorXd& y) const {
  const double lhs = coeffs.dot(y);
  return (op == Cmp::ge || op == Cmp::gt) ? lhs - rhs : rhs - lhs;
}

bool LinearConstraint::holds(const Eigen::VectorXd& y) const {
  const double lhs = coeffs.dot(y);
  switch (op) {
  case Cmp::le: return lhs <= rhs;
  case Cmp::ge: return lhs >= rhs;
  case Cmp::lt: return lhs < rhs;
  case Cmp::gt: return lhs > rhs;
  }
  return false;
}

bool OutputFormula::holds(const Eigen::VectorXd& y) const {
  switch (kind) {
  case Kind::atom: return atom.holds(y);
  case Kind::all_of:
    for (const auto& c : children) {
      if (!c.holds(y)) return false;
    }
    return true;
  case Kind::any_of:
    for (const auto& c : children) {
      if (c.holds(y)) return true;
    }
    return false;
  }
  return false;
}

namespace {

OutputFormula formula_from_dnf(const std::vector<Conjunction>& disjuncts) {
  OutputFormula any;
  any.kind = OutputFormula::Kind::any_of;
  for (const auto& conj : disjuncts) {
    OutputFormula all;
    all.kind = OutputFormula::Kind::all_of;
    for (const auto& c : conj) {
      OutputFormula leaf;
      leaf.kind = OutputFormula::Kind::atom;
      leaf.atom = c;
      all.children.push_back(std::move(leaf));
    }
    any.children.push_back(std::move(all));
  }
  return any;
}

void check_problem(const VerificationProblem& p) {
  if (p.input_box.dim() != p.net.input_dim() || p.input_box.upper.size() != p.net.input_dim()) {
    throw InputError("input box dimension does not match the network");
  }
  if (!p.input_box.is_valid()) {
    throw InputError("input box must be finite with lower <= upper");
  }
  for (const auto& conj : p.negated_output) {
    for (const auto& c : conj) {
      if (static_cast<std::size_t>(c.coeffs.size()) != p.net.output_dim()) {
        throw InputError("output constraint references outputs beyond the network");
      }
    }
  }
}

} // namespace

VerificationProblem::VerificationProblem(Network network, Box box, std::vector<Conjunction> disjuncts)
    : net(std::move(network)), input_box(std::move(box)), negated_output(std::move(disjuncts)),
      counterexample_formula(formula_from_dnf(negated_output)) {
  check_problem(*this);
}

VerificationProblem::VerificationProblem(Network network, Box box, OutputFormula formula)
    : net(std::move(network)), input_box(std::move(box)), negated_output(to_dnf(formula)),
      counterexample_formula(std::move(formula)) {
  check_problem(*this);
}

std::optional<std::size_t> VerificationProblem::satisfied_disjunct(const Eigen::VectorXd& outputs) const {
  for (std::size_t d = 0; d < negated_output.size(); ++d) {
    bool all = true;
    for (const auto& c : negated_output[d]) {
      if (!c.holds(outputs)) {
        all = false;
        break;
      }
    }
    if (all) return d;
  }
  return std::nullopt;
}

bool VerificationProblem::is_counterexample(std::span<const double> x) const {
  if (!input_box.contains(x)) {
    return false;
  }
  return satisfied_disjunct(net.forward(x).outputs).has_value();
}

std::vector<Conjunction> to_dnf(const OutputFormula& formula) {
  constexpr std::size_t max_disjuncts = 4096;
  switch (formula.kind) {
  case OutputFormula::Kind::atom: return {Conjunction{formula.atom}};
  case OutputFormula::Kind::any_of: {
    std::vector<Conjunction> out;
    for (const auto& child : formula.children) {
      auto part = to_dnf(child);
      out.insert(out.end(), part.begin(), part.end());
    }
    return out;
  }
  case OutputFormula::Kind::all_of: {
    std::vector<Conjunction> acc{Conjunction{}};
    for (const auto& child : formula.children) {
      const auto part = to_dnf(child);
      std::vector<Conjunction> next;
      for (const auto& a : acc) {
        for (const auto& b : part) {
          Conjunction merged = a;
          merged.insert(merged.end(), b.begin(), b.end());
          next.push_back(std::move(merged));
        }
      }
      if (next.size() > max_disjuncts) {
        throw InputError("output property expands to more than 4096 disjuncts");
      }
      acc = std::move(next);
    }
    return acc;
  }
  }
  return {};
}

// ---------------------------------------------------------------------------
// Network JSON

namespace {

std::size_t line_of_offset(std::string_view text, std::size_t offset) {
  std::size_t line = 1;
  for (std::size_t i = 0; i < offset && i < text.size(); ++i) {
    if (text[i] == '\n') ++line;
  }
  return line;
}

/// Line of the n-th occurrence (0-based) of a quoted key, 0 if absent.
std::size_t line_of_key(std::string_view text, std::string_view key, std::size_t nth) {
  const std::string quoted = "\"" + std::string(key) + "\"";
  std::size_t pos = 0;
  for (std::size_t seen = 0;; ++seen) {
    pos = text.find(quoted, pos);
    if (pos == std::string_view::npos) return 0;
    if (seen == nth) return line_of_offset(text, pos);
    pos += quoted.size();
  }
}

std::vector<double> number_array(const json& j, std::size_t line, const std::string& what) {
  if (!j.is_array()) throw ParseError(line, what + " must be an array");
  std::vector<double> out;
  for (const auto& v : j) {
    if (!v.is_number()) throw ParseError(line, what + " must contain only numbers");
    out.push_back(v.get<double>());
  }
  return out;
}

} // namespace

Network parse_network(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(line_of_offset(text, e.byte > 0 ? e.byte - 1 : 0), std::string("malformed JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ParseError(1, "network document must be a JSON object");
  if (!doc.contains("input_dim") || !doc["input_dim"].is_number_integer() || doc["input_dim"].get<long long>() <= 0) {
    throw ParseError(line_of_key(text, "input_dim", 0), "input_dim must be a positive integer");
  }
  if (!doc.contains("layers") || !doc["layers"].is_array()) {
    throw ParseError(line_of_key(text, "layers", 0), "layers must be an array");
  }
  const auto input_dim = static_cast<std::size_t>(doc["input_dim"].get<long long>());

  std::vector<Layer> layers;
  std::size_t k = 0;
  for (const auto& jl : doc["layers"]) {
    const std::size_t wline = line_of_key(text, "weights", k);
    const std::size_t bline = line_of_key(text, "bias", k);
    const std::size_t aline = line_of_key(text, "activation", k);
    const std::string name = "layer " + std::to_string(k + 1);
    if (!jl.is_object() || !jl.contains("weights") || !jl.contains("bias") || !jl.contains("activation")) {
      throw ParseError(wline, name + " needs weights, bias and activation");
    }
    const json& jw = jl["weights"];
    if (!jw.is_array() || jw.empty()) throw ParseError(wline, name + " weights must be a non-empty matrix");
    std::vector<std::vector<double>> rows;
    for (const auto& r : jw) rows.push_back(number_array(r, wline, name + " weights row"));
    const std::size_t cols = rows.front().size();
    for (const auto& r : rows) {
      if (r.size() != cols) throw ParseError(wline, name + " weights rows have different lengths");
    }
    Layer layer;
    layer.weights.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols));
    for (std::size_t i = 0; i < rows.size(); ++i) {
      for (std::size_t j = 0; j < cols; ++j) {
        layer.weights(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
      }
    }
    const auto bias = number_array(jl["bias"], bline, name + " bias");
    if (bias.size() != rows.size()) {
      throw ParseError(bline, name + " bias length " + std::to_string(bias.size()) + " does not match row count " +
                                  std::to_string(rows.size()));
    }
    layer.bias = Eigen::Map<const Eigen::VectorXd>(bias.data(), static_cast<Eigen::Index>(bias.size()));
    const json& ja = jl["activation"];
    if (ja == "relu") {
      layer.activation = Activation::relu;
    } else if (ja == "none") {
      layer.activation = Activation::identity;
    } else {
      throw ParseError(aline, name + " activation must be \"relu\" or \"none\"");
    }
    layers.push_back(std::move(layer));
    ++k;
  }
  try {
    return Network(input_dim, std::move(layers));
  } catch (const InputError& e) {
    // Point at the layer the message names, if any.
    std::size_t line = 0;
    const std::string msg = e.what();
    if (auto p = msg.find("layer "); p != std::string::npos) {
      const std::size_t idx = std::strtoul(msg.c_str() + p + 6, nullptr, 10);
      if (idx > 0) line = line_of_key(text, "weights", idx - 1);
    }
    throw ParseError(line, msg);
  }
}

std::string serialize_network(const Network& net) {
  json doc;
  doc["input_dim"] = net.input_dim();
  doc["layers"] = json::array();
  for (const Layer& layer : net.layers()) {
    json jl;
    json rows = json::array();
    for (Eigen::Index i = 0; i < layer.weights.rows(); ++i) {
      json row = json::array();
      for (Eigen::Index j = 0; j < layer.weights.cols(); ++j) row.push_back(layer.weights(i, j));
      rows.push_back(std::move(row));
    }
    jl["weights"] = std::move(rows);
    jl["bias"] = std::vector<double>(layer.bias.data(), layer.bias.data() + layer.bias.size());
    jl["activation"] = layer.activation == Activation::relu ? "relu" : "none";
    doc["layers"].push_back(std::move(jl));
  }
  return doc.dump(2) + "\n";
}

// ---------------------------------------------------------------------------
// VNN-LIB subset

namespace {

struct SExpr {
  std::string atom; // empty for lists
  std::vector<SExpr> items;
  std::size_t line = 0;
  [[nodiscard]] bool is_list() const { return atom.empty(); }
};

class SExprReader {
public:
  explicit SExprReader(std::string_view text) : text_(text) {}

  std::optional<SExpr> next() {
    skip_space();
    if (pos_ >= text_.size()) return std::nullopt;
    return read();
  }

private:
  void skip_space() {
    while (pos_ < text_.size()) {
      const char c = text_[pos_];
      if (c == ';') {
        while (pos_ < text_.size() && text_[pos_] != '\n') ++pos_;
      } else if (c == '\n') {
        ++line_;
        ++pos_;
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        ++pos_;
      } else {
        break;
      }
    }
  }

  SExpr read() {
    skip_space();
    if (pos_ >= text_.size()) throw ParseError(line_, "unexpected end of input");
    SExpr e;
    e.line = line_;
    if (text_[pos_] == ')') throw ParseError(line_, "unexpected ')'");
    if (text_[pos_] == '(') {
      ++pos_;
      for (;;) {
        skip_space();
        if (pos_ >= text_.size()) throw ParseError(e.line, "unbalanced '('");
        if (text_[pos_] == ')') {
          ++pos_;
          break;
        }
        e.items.push_back(read());
      }
      return e;
    }
    const std::size_t start = pos_;
    while (pos_ < text_.size() && !std::isspace(static_cast<unsigned char>(text_[pos_])) && text_[pos_] != '(' &&
           text_[pos_] != ')' && text_[pos_] != ';') {
      ++pos_;
    }
    e.atom = std::string(text_.substr(start, pos_ - start));
    return e;
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
};

std::optional<double> parse_number(const std::string& s) {
  double v = 0.0;
  const char* first = s.data();
  const char* last = s.data() + s.size();
  if (first != last && *first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last || !std::isfinite(v)) return std::nullopt;
  return v;
}

enum class VarKind { input, output };
struct VarRef {
  VarKind kind;
  std::size_t index;
};

/// Linear expression: sum of coefficients over X and Y plus a constant.
struct LinExpr {
  std::map<std::size_t, double> x;
  std::map<std::size_t, double> y;
  double constant = 0.0;

  [[nodiscard]] bool is_constant() const { return x.empty() && y.empty(); }
  void scale(double f) {
    for (auto& [_, c] : x) c *= f;
    for (auto& [_, c] : y) c *= f;
    constant *= f;
  }
  void add(const LinExpr& o, double f = 1.0) {
    for (const auto& [i, c] : o.x) x[i] += f * c;
    for (const auto& [i, c] : o.y) y[i] += f * c;
    constant += f * o.constant;
  }
};

class VnnlibParser {
public:
  VnnlibParser(std::string_view text, const Network& net)
      : text_(text), n_in_(net.input_dim()), n_out_(net.output_dim()) {}

  VerificationProblem parse(Network net) {
    lower_.assign(n_in_, std::nullopt);
    upper_.assign(n_in_, std::nullopt);
    OutputFormula formula;
    formula.kind = OutputFormula::Kind::all_of;

    SExprReader reader(text_);
    while (auto cmd = reader.next()) {
      if (!cmd->is_list() || cmd->items.empty() || cmd->items[0].is_list()) {
        throw ParseError(cmd->line, "expected a command list");
      }
      const std::string& head = cmd->items[0].atom;
      if (head == "declare-const") {
        declare(*cmd);
      } else if (head == "assert") {
        if (cmd->items.size() != 2) throw ParseError(cmd->line, "assert takes one argument");
        if (auto f = assertion(cmd->items[1], 0)) formula.children.push_back(std::move(*f));
      } else {
        throw ParseError(cmd->line, "unsupported construct '" + head + "'");
      }
    }

    for (std::size_t i = 0; i < n_in_; ++i) {
      if (!declared_x_.count(i)) throw ParseError(0, "X_" + std::to_string(i) + " is not declared");
    }
    for (std::size_t j = 0; j < n_out_; ++j) {
      if (!declared_y_.count(j)) throw ParseError(0, "Y_" + std::to_string(j) + " is not declared");
    }
    Box box;
    for (std::size_t i = 0; i < n_in_; ++i) {
      if (!lower_[i]) throw ParseError(0, "missing lower bound for X_" + std::to_string(i));
      if (!upper_[i]) throw ParseError(0, "missing upper bound for X_" + std::to_string(i));
      if (*lower_[i] > *upper_[i]) {
        throw ParseError(0, "empty input range for X_" + std::to_string(i));
      }
      box.lower.push_back(*lower_[i]);
      box.upper.push_back(*upper_[i]);
    }
    if (formula.children.empty()) {
      throw ParseError(0, "property has no assertion over Y");
    }
    if (formula.children.size() == 1) {
      OutputFormula only = std::move(formula.children.front());
      formula = std::move(only);
    }
    return VerificationProblem(std::move(net), std::move(box), std::move(formula));
  }

private:
  void declare(const SExpr& cmd) {
    if (cmd.items.size() != 3 || cmd.items[1].is_list() || cmd.items[2].atom != "Real") {
      throw ParseError(cmd.line, "expected (declare-const NAME Real)");
    }
    const auto ref = lookup(cmd.items[1].atom, cmd.line);
    if (!ref) throw ParseError(cmd.line, "unsupported variable name '" + cmd.items[1].atom + "'");
    auto& set = ref->kind == VarKind::input ? declared_x_ : declared_y_;
    if (!set.insert(ref->index).second) {
      throw ParseError(cmd.line, "duplicate declaration of " + cmd.items[1].atom);
    }
  }

  std::optional<VarRef> lookup(const std::string& name, std::size_t line) const {
    if (name.size() < 3 || name[1] != '_' || (name[0] != 'X' && name[0] != 'Y')) return std::nullopt;
    std::size_t idx = 0;
    auto [ptr, ec] = std::from_chars(name.data() + 2, name.data() + name.size(), idx);
    if (ec != std::errc() || ptr != name.data() + name.size()) return std::nullopt;
    const bool input = name[0] == 'X';
    const std::size_t limit = input ? n_in_ : n_out_;
    if (idx >= limit) {
      throw ParseError(line, name + " is out of range (network has " + std::to_string(limit) +
                                 (input ? " inputs)" : " outputs)"));
    }
    return VarRef{input ? VarKind::input : VarKind::output, idx};
  }

  LinExpr term(const SExpr& e) {
    LinExpr out;
    if (!e.is_list()) {
      if (auto v = parse_number(e.atom)) {
        out.constant = *v;
        return out;
      }
      const auto ref = lookup(e.atom, e.line);
      if (!ref) throw ParseError(e.line, "unsupported term '" + e.atom + "'");
      const auto& declared = ref->kind == VarKind::input ? declared_x_ : declared_y_;
      if (!declared.count(ref->index)) throw ParseError(e.line, e.atom + " used before declaration");
      (ref->kind == VarKind::input ? out.x : out.y)[ref->index] = 1.0;
      return out;
    }
    if (e.items.empty() || e.items[0].is_list()) throw ParseError(e.line, "malformed term");
    const std::string& op = e.items[0].atom;
    const std::size_t nargs = e.items.size() - 1;
    if (op == "+") {
      for (std::size_t i = 1; i < e.items.size(); ++i) out.add(term(e.items[i]));
      return out;
    }
    if (op == "-") {
      if (nargs == 0) throw ParseError(e.line, "'-' needs arguments");
      out = term(e.items[1]);
      if (nargs == 1) {
        out.scale(-1.0);
        return out;
      }
      for (std::size_t i = 2; i < e.items.size(); ++i) out.add(term(e.items[i]), -1.0);
      return out;
    }
    if (op == "*") {
      if (nargs == 0) throw ParseError(e.line, "'*' needs arguments");
      out.constant = 1.0;
      bool have_var = false;
      for (std::size_t i = 1; i < e.items.size(); ++i) {
        LinExpr f = term(e.items[i]);
        if (f.is_constant()) {
          out.scale(f.constant);
        } else {
          if (have_var) throw ParseError(e.line, "nonlinear product is not supported");
          have_var = true;
          f.scale(out.constant);
          out = std::move(f);
        }
      }
      return out;
    }
    if (op == "/") {
      if (nargs != 2) throw ParseError(e.line, "'/' takes two arguments");
      out = term(e.items[1]);
      const LinExpr d = term(e.items[2]);
      if (!d.is_constant() || d.constant == 0.0) throw ParseError(e.line, "division by a non-constant or zero");
      out.scale(1.0 / d.constant);
      return out;
    }
    throw ParseError(e.line, "unsupported construct '" + op + "'");
  }

  static std::optional<Cmp> comparison(const std::string& op) {
    if (op == "<=") return Cmp::le;
    if (op == ">=") return Cmp::ge;
    if (op == "<") return Cmp::lt;
    if (op == ">") return Cmp::gt;
    return std::nullopt;
  }

  /// Returns an output formula, or nullopt when the expression only bounds
  /// inputs (recorded into the box).
  std::optional<OutputFormula> assertion(const SExpr& e, int depth) {
    if (!e.is_list() || e.items.empty() || e.items[0].is_list()) {
      throw ParseError(e.line, "expected a comparison, and, or or");
    }
    const std::string& head = e.items[0].atom;
    if (head == "and" || head == "or") {
      if (depth > 2) throw ParseError(e.line, "and/or nested too deeply");
      OutputFormula f;
      f.kind = head == "and" ? OutputFormula::Kind::all_of : OutputFormula::Kind::any_of;
      bool saw_input = false;
      for (std::size_t i = 1; i < e.items.size(); ++i) {
        auto child = assertion(e.items[i], depth + 1);
        if (child) {
          f.children.push_back(std::move(*child));
        } else {
          saw_input = true;
        }
      }
      if (saw_input && (head == "or" || depth > 0)) {
        throw ParseError(e.line, "input bounds may only appear in top-level assert/and");
      }
      if (f.children.empty()) {
        if (saw_input) return std::nullopt;
        throw ParseError(e.line, "empty '" + head + "'");
      }
      return f;
    }
    const auto op = comparison(head);
    if (!op) throw ParseError(e.line, "unsupported construct '" + head + "'");
    if (e.items.size() != 3) throw ParseError(e.line, "comparison takes two terms");
    LinExpr diff = term(e.items[1]);
    diff.add(term(e.items[2]), -1.0);
    // diff op 0
    if (!diff.x.empty() && !diff.y.empty()) {
      throw ParseError(e.line, "inequality mixes input and output variables");
    }
    if (!diff.x.empty()) {
      if (depth > 1) throw ParseError(e.line, "input bounds may only appear in top-level assert/and");
      input_bound(diff, *op, e.line);
      return std::nullopt;
    }
    if (diff.y.empty()) throw ParseError(e.line, "comparison between constants");
    OutputFormula leaf;
    leaf.kind = OutputFormula::Kind::atom;
    leaf.atom.coeffs = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n_out_));
    for (const auto& [j, c] : diff.y) leaf.atom.coeffs(static_cast<Eigen::Index>(j)) = c;
    leaf.atom.op = *op;
    leaf.atom.rhs = -diff.constant;
    return leaf;
  }

  void input_bound(const LinExpr& diff, Cmp op, std::size_t line) {
    std::size_t nonzero = 0;
    std::size_t idx = 0;
    double coef = 0.0;
    for (const auto& [i, c] : diff.x) {
      if (c != 0.0) {
        ++nonzero;
        idx = i;
        coef = c;
      }
    }
    if (nonzero != 1) throw ParseError(line, "constraint on inputs must bound a single X_i");
    if (is_strict(op)) throw ParseError(line, "strict input bounds are not supported");
    // coef * x + k op 0  =>  x op' -k / coef
    const double value = -diff.constant / coef;
    const bool upper = (op == Cmp::le) == (coef > 0.0);
    auto& slot = upper ? upper_[idx] : lower_[idx];
    slot = slot ? (upper ? std::min(*slot, value) : std::max(*slot, value)) : value;
  }

  std::string_view text_;
  std::size_t n_in_;
  std::size_t n_out_;
  std::set<std::size_t> declared_x_;
  std::set<std::size_t> declared_y_;
  std::vector<std::optional<double>> lower_;
  std::vector<std::optional<double>> upper_;
};

std::string format_number(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

std::string format_constraint(const LinearConstraint& c) {
  std::string lhs;
  std::size_t terms = 0;
  std::string body;
  for (Eigen::Index j = 0; j < c.coeffs.size(); ++j) {
    if (c.coeffs(j) == 0.0) continue;
    ++terms;
    body += " (* " + format_number(c.coeffs(j)) + " Y_" + std::to_string(j) + ")";
  }
  if (terms == 0) {
    lhs = "0";
  } else if (terms == 1) {
    lhs = body.substr(1);
  } else {
    lhs = "(+" + body + ")";
  }
  return "(" + std::string(to_string(c.op)) + " " + lhs + " " + format_number(c.rhs) + ")";
}

} // namespace

VerificationProblem parse_vnnlib(std::string_view text, Network net) {
  VnnlibParser parser(text, net);
  return parser.parse(std::move(net));
}

std::string serialize_vnnlib(const VerificationProblem& problem) {
  std::ostringstream os;
  for (std::size_t i = 0; i < problem.net.input_dim(); ++i) os << "(declare-const X_" << i << " Real)\n";
  for (std::size_t j = 0; j < problem.net.output_dim(); ++j) os << "(declare-const Y_" << j << " Real)\n";
  os << "\n";
  for (std::size_t i = 0; i < problem.input_box.dim(); ++i) {
    os << "(assert (>= X_" << i << " " << format_number(problem.input_box.lower[i]) << "))\n";
    os << "(assert (<= X_" << i << " " << format_number(problem.input_box.upper[i]) << "))\n";
  }
  os << "\n(assert (or";
  for (const auto& conj : problem.negated_output) {
    os << "\n  (and";
    for (const auto& c : conj) os << " " << format_constraint(c);
    os << ")";
  }
  os << "\n))\n";
  return os.str();
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

} // namespace relusat
