#include "affective/model.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <optional>
#include <sstream>

namespace affective {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

bool is_identifier(std::string_view s) {
  if (s.empty()) return false;
  if (!(std::isalpha(static_cast<unsigned char>(s[0])) || s[0] == '_')) return false;
  return std::all_of(s.begin(), s.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
  });
}

std::optional<double> parse_real(std::string_view s) {
  s = trim(s);
  if (s == "inf" || s == "+inf") return std::numeric_limits<double>::infinity();
  if (s == "-inf") return -std::numeric_limits<double>::infinity();
  if (!s.empty() && s[0] == '+') s.remove_prefix(1);
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) return std::nullopt;
  return v;
}

std::optional<std::size_t> parse_index(std::string_view s) {
  s = trim(s);
  std::size_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) return std::nullopt;
  return v;
}

std::string utility_name(std::size_t j) { return "u" + std::to_string(j + 1); }

struct PendingUtility {
  std::string text;
  std::size_t line = 0;
};

double inset_eps(const ActionVariable& a) {
  if (std::isfinite(a.lo) && std::isfinite(a.hi)) return 1e-6 * (a.hi - a.lo);
  return 1e-6;
}

}  // namespace

InteractionModel InteractionModel::load(std::string_view document) {
  InteractionModel model;
  model.source_ = std::string(document);

  std::optional<std::size_t> players;
  std::size_t players_line = 0;
  std::map<std::size_t, std::pair<ActionVariable, std::size_t>> vars;
  std::map<std::size_t, PendingUtility> utilities;

  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= document.size()) {
    const auto end = document.find('\n', pos);
    std::string_view line = document.substr(pos, end == std::string_view::npos ? std::string_view::npos : end - pos);
    pos = end == std::string_view::npos ? document.size() + 1 : end + 1;
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;

    const auto colon = line.find(':');
    if (colon == std::string_view::npos) throw ModelError("expected '<key>: <value>'", line_no);
    const std::string_view head = trim(line.substr(0, colon));
    const std::string_view value = trim(line.substr(colon + 1));
    const auto space = head.find_first_of(" \t");
    const std::string_view keyword = head.substr(0, space);
    const std::string_view arg = space == std::string_view::npos ? std::string_view{} : trim(head.substr(space));

    if (keyword == "players") {
      if (!arg.empty()) throw ModelError("unexpected text after 'players'", line_no);
      if (players) throw ModelError("duplicate 'players' line", line_no);
      const auto n = parse_index(value);
      if (!n) throw ModelError("player count must be an integer", line_no);
      if (*n < 2 || *n > kMaxPlayers)
        throw ModelError("player count must be between 2 and " + std::to_string(kMaxPlayers), line_no);
      players = *n;
      players_line = line_no;
    } else if (keyword == "param") {
      if (!is_identifier(arg)) throw ModelError("invalid parameter name '" + std::string(arg) + "'", line_no);
      const auto v = parse_real(value);
      if (!v || !std::isfinite(*v)) throw ModelError("parameter value must be a finite real", line_no);
      if (!model.params_.emplace(std::string(arg), *v).second)
        throw ModelError("duplicate parameter '" + std::string(arg) + "'", line_no);
    } else if (keyword == "var") {
      const auto idx = parse_index(arg);
      if (!idx || *idx == 0) throw ModelError("player index must be a positive integer", line_no);
      // <ident> in (<lo>, <hi>)
      const auto in_pos = value.find(" in ");
      if (in_pos == std::string_view::npos) throw ModelError("expected '<ident> in (<lo>, <hi>)'", line_no);
      const std::string_view name = trim(value.substr(0, in_pos));
      std::string_view interval = trim(value.substr(in_pos + 4));
      if (!is_identifier(name)) throw ModelError("invalid action name '" + std::string(name) + "'", line_no);
      if (interval.size() < 2 || interval.front() != '(' || interval.back() != ')')
        throw ModelError("action interval must be open: (<lo>, <hi>)", line_no);
      interval = interval.substr(1, interval.size() - 2);
      const auto comma = interval.find(',');
      if (comma == std::string_view::npos) throw ModelError("expected '(<lo>, <hi>)'", line_no);
      const auto lo = parse_real(interval.substr(0, comma));
      const auto hi = parse_real(interval.substr(comma + 1));
      if (!lo || !hi) throw ModelError("interval bounds must be reals or -inf/inf", line_no);
      if (!(*lo < *hi)) throw ModelError("interval requires lo < hi", line_no);
      if (!vars.emplace(*idx, std::make_pair(ActionVariable{std::string(name), *lo, *hi}, line_no)).second)
        throw ModelError("duplicate 'var' for player " + std::to_string(*idx), line_no);
    } else if (keyword == "utility") {
      const auto idx = parse_index(arg);
      if (!idx || *idx == 0) throw ModelError("player index must be a positive integer", line_no);
      if (value.empty()) throw ModelError("empty utility expression", line_no);
      if (!utilities.emplace(*idx, PendingUtility{std::string(value), line_no}).second)
        throw ModelError("duplicate 'utility' for player " + std::to_string(*idx), line_no);
    } else {
      throw ModelError("unknown keyword '" + std::string(keyword) + "'", line_no);
    }
  }

  if (!players) throw ModelError("missing 'players' line", 0);
  const std::size_t n = *players;
  for (const auto& [idx, entry] : vars)
    if (idx > n) throw ModelError("player index " + std::to_string(idx) + " exceeds player count", entry.second);
  for (const auto& [idx, entry] : utilities)
    if (idx > n) throw ModelError("player index " + std::to_string(idx) + " exceeds player count", entry.line);
  for (std::size_t i = 1; i <= n; ++i) {
    if (!vars.count(i)) throw ModelError("missing 'var " + std::to_string(i) + "'", players_line);
    if (!utilities.count(i)) throw ModelError("missing 'utility " + std::to_string(i) + "'", players_line);
  }

  for (std::size_t i = 1; i <= n; ++i) model.actions_.push_back(vars.at(i).first);

  // Name collisions between actions, parameters and reserved utility names.
  for (std::size_t i = 0; i < n; ++i) {
    const auto& name = model.actions_[i].name;
    const std::size_t line = vars.at(i + 1).second;
    for (std::size_t j = 0; j < i; ++j)
      if (model.actions_[j].name == name) throw ModelError("duplicate action name '" + name + "'", line);
    for (std::size_t j = 0; j < n; ++j)
      if (name == utility_name(j)) throw ModelError("action name '" + name + "' is reserved", line);
    if (model.params_.count(name)) throw ModelError("action name '" + name + "' shadows a parameter", line);
  }
  for (const auto& [pname, pvalue] : model.params_)
    for (std::size_t j = 0; j < n; ++j)
      if (pname == utility_name(j)) throw ModelError("parameter name '" + pname + "' is reserved", 0);

  for (std::size_t i = 0; i < n; ++i) {
    const PendingUtility& pending = utilities.at(i + 1);
    expr::Expr e;
    try {
      e = expr::parse(pending.text);
    } catch (const expr::ParseError& err) {
      throw ModelError(std::string("utility ") + std::to_string(i + 1) + ": " + err.what(), pending.line);
    }
    for (const auto& var : expr::free_variables(e)) {
      if (var == model.actions_[i].name || model.params_.count(var)) continue;
      if (var == utility_name(i))
        throw ModelError("self-utility reference: utility " + std::to_string(i + 1) + " references '" + var +
                             "'",
                         pending.line);
      bool known = false;
      for (std::size_t j = 0; j < n; ++j) {
        if (j != i && var == utility_name(j)) known = true;
        if (j != i && var == model.actions_[j].name)
          throw ModelError("non-affective reference: utility " + std::to_string(i + 1) + " references '" + var +
                               "', the action of player " + std::to_string(j + 1),
                           pending.line);
      }
      if (!known)
        throw ModelError("unknown identifier '" + var + "' in utility " + std::to_string(i + 1), pending.line);
    }
    model.utilities_.push_back(expr::substitute(e, model.params_));
  }

  for (const auto& a : model.actions_) model.slot_names_.push_back(a.name);
  for (std::size_t j = 0; j < n; ++j) model.slot_names_.push_back(utility_name(j));
  model.build_derivatives();
  return model;
}

void InteractionModel::build_derivatives() {
  const std::size_t n = players();
  const std::span<const std::string> names(slot_names_);
  affection_.assign(n * n, expr::constant(0.0));
  cross_.assign(n * n, expr::constant(0.0));
  separable_ = true;
  expr::Env zero_u;
  for (std::size_t j = 0; j < n; ++j) zero_u[utility_name(j)] = 0.0;

  for (std::size_t i = 0; i < n; ++i) {
    const expr::Expr& v = utilities_[i];
    const std::string& own = actions_[i].name;
    const expr::Expr dx = expr::differentiate(v, own);
    bound_utilities_.push_back(expr::bind_slots(v, names));
    own_partial_.push_back(expr::bind_slots(dx, names));
    own_second_.push_back(expr::bind_slots(expr::differentiate(dx, own), names));
    base_.push_back(expr::bind_slots(expr::substitute(v, zero_u), names));
    for (std::size_t j = 0; j < n; ++j) {
      const expr::Expr du = expr::differentiate(v, utility_name(j));
      affection_[i * n + j] = expr::bind_slots(du, names);
      cross_[i * n + j] = expr::bind_slots(expr::differentiate(dx, utility_name(j)), names);
      if (i == j) continue;
      for (const auto& var : slot_names_)
        if (!expr::differentiate(du, var).is_zero()) separable_ = false;
    }
  }
}

std::vector<double> InteractionModel::slots(const Vector& x, const Vector& u) const {
  const std::size_t n = players();
  if (static_cast<std::size_t>(x.size()) != n || static_cast<std::size_t>(u.size()) != n)
    throw std::invalid_argument("profile dimension does not match the player count");
  std::vector<double> s(2 * n);
  for (std::size_t i = 0; i < n; ++i) {
    s[i] = x(static_cast<Eigen::Index>(i));
    s[n + i] = u(static_cast<Eigen::Index>(i));
  }
  return s;
}

double InteractionModel::inset_lo(std::size_t i) const { return actions_[i].lo + inset_eps(actions_[i]); }
double InteractionModel::inset_hi(std::size_t i) const { return actions_[i].hi - inset_eps(actions_[i]); }

double InteractionModel::window_lo(std::size_t i) const {
  const auto& a = actions_[i];
  if (std::isfinite(a.lo)) return inset_lo(i);
  return std::isfinite(a.hi) ? a.hi - 2.0 * kUnboundedWindow : -kUnboundedWindow;
}

double InteractionModel::window_hi(std::size_t i) const {
  const auto& a = actions_[i];
  if (std::isfinite(a.hi)) return inset_hi(i);
  return std::isfinite(a.lo) ? a.lo + 2.0 * kUnboundedWindow : kUnboundedWindow;
}

bool InteractionModel::interior(const Vector& x) const {
  if (static_cast<std::size_t>(x.size()) != players()) return false;
  for (std::size_t i = 0; i < players(); ++i) {
    const double xi = x(static_cast<Eigen::Index>(i));
    if (!(xi > actions_[i].lo && xi < actions_[i].hi)) return false;
  }
  return true;
}

Vector InteractionModel::clamp_to_inset(const Vector& x) const {
  Vector out = x;
  for (std::size_t i = 0; i < players(); ++i) {
    auto k = static_cast<Eigen::Index>(i);
    out(k) = std::clamp(out(k), inset_lo(i), inset_hi(i));
  }
  return out;
}

Vector InteractionModel::window_midpoint() const {
  Vector m(static_cast<Eigen::Index>(players()));
  for (std::size_t i = 0; i < players(); ++i)
    m(static_cast<Eigen::Index>(i)) = 0.5 * (window_lo(i) + window_hi(i));
  return m;
}

Vector InteractionModel::evaluate_v(const Vector& x, const Vector& u) const {
  const auto s = slots(x, u);
  Vector v(static_cast<Eigen::Index>(players()));
  for (std::size_t i = 0; i < players(); ++i) v(static_cast<Eigen::Index>(i)) = expr::eval(bound_utilities_[i], s);
  return v;
}

Vector InteractionModel::residual(const Vector& x, const Vector& u) const { return u - evaluate_v(x, u); }

Matrix InteractionModel::affection_jacobian(const Vector& x, const Vector& u) const {
  const std::size_t n = players();
  const auto s = slots(x, u);
  Matrix j = Matrix::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < n; ++c)
      if (r != c) j(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = expr::eval(affection_[r * n + c], s);
  return j;
}

double InteractionModel::utility_value(std::size_t i, const Vector& x, const Vector& u) const {
  return expr::eval(bound_utilities_[i], slots(x, u));
}

double InteractionModel::own_partial(std::size_t i, const Vector& x, const Vector& u) const {
  return expr::eval(own_partial_[i], slots(x, u));
}

double InteractionModel::own_second(std::size_t i, const Vector& x, const Vector& u) const {
  return expr::eval(own_second_[i], slots(x, u));
}

double InteractionModel::cross_partial(std::size_t i, std::size_t j, const Vector& x, const Vector& u) const {
  return expr::eval(cross_[i * players() + j], slots(x, u));
}

Vector InteractionModel::own_partials(const Vector& x, const Vector& u) const {
  const auto s = slots(x, u);
  Vector d(static_cast<Eigen::Index>(players()));
  for (std::size_t i = 0; i < players(); ++i) d(static_cast<Eigen::Index>(i)) = expr::eval(own_partial_[i], s);
  return d;
}

InteractionModel load_model_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ModelError("cannot open model file '" + path + "'", 0);
  std::ostringstream text;
  text << in.rdbuf();
  return InteractionModel::load(text.str());
}

}  // namespace affective
