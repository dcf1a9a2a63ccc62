#include "ftfl/instance.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <istream>
#include <optional>
#include <sstream>
#include <string_view>

#include "ftfl/errors.hpp"
#include "ftfl/numfmt.hpp"
#include "ftfl/rng.hpp"

namespace ftfl {

namespace {

// ---------- tokenizing ----------

struct Tokenizer {
  std::string_view text;
  std::size_t pos = 0;
  int line = 1;        // line under the cursor
  int token_line = 1;  // line of the token most recently returned

  std::optional<std::string_view> next() {
    for (;;) {
      while (pos < text.size() && std::isspace((unsigned char)text[pos])) {
        if (text[pos] == '\n') ++line;
        ++pos;
      }
      if (pos < text.size() && text[pos] == '#') {
        while (pos < text.size() && text[pos] != '\n') ++pos;
        continue;
      }
      break;
    }
    if (pos >= text.size()) return std::nullopt;
    token_line = line;
    const std::size_t start = pos;
    while (pos < text.size() && !std::isspace((unsigned char)text[pos]) &&
           text[pos] != '#') {
      ++pos;
    }
    return text.substr(start, pos - start);
  }

  std::string_view require(const char* what) {
    auto tok = next();
    if (!tok) throw ParseError(std::string("missing ") + what, line);
    return *tok;
  }
};

int parse_int(std::string_view tok, int line, const char* what) {
  int value = 0;
  auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), value);
  if (ec != std::errc() || p != tok.data() + tok.size()) {
    throw ParseError(std::string("bad integer for ") + what + ": '" +
                         std::string(tok) + "'",
                     line);
  }
  return value;
}

double parse_double(std::string_view tok, int line, const char* what) {
  double value = 0;
  auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), value);
  if (ec != std::errc() || p != tok.data() + tok.size() || !std::isfinite(value)) {
    throw ParseError(std::string("bad number for ") + what + ": '" +
                         std::string(tok) + "'",
                     line);
  }
  return value;
}

// The token must be fetched before token_line is read, so these helpers keep
// the two steps in separate statements.
int require_int(Tokenizer& tk, const char* what) {
  const auto tok = tk.require(what);
  return parse_int(tok, tk.token_line, what);
}

double require_double(Tokenizer& tk, const char* what) {
  const auto tok = tk.require(what);
  return parse_double(tok, tk.token_line, what);
}

}  // namespace

// ---------- Instance ----------

int Instance::max_requirement() const {
  int rmax = 0;
  for (int rj : r) rmax = std::max(rmax, rj);
  return rmax;
}

void Instance::validate() const {
  if (m < 1 || n < 1) throw InvalidInputError("instance needs m >= 1 and n >= 1");
  if (int(f.size()) != m) throw InvalidInputError("f has wrong size");
  if (int(c.size()) != n || int(r.size()) != n)
    throw InvalidInputError("c or r has wrong size");
  for (int i = 0; i < m; ++i) {
    if (!std::isfinite(f[std::size_t(i)]) || f[std::size_t(i)] < 0.0)
      throw InvalidInputError("opening costs must be finite and nonnegative");
  }
  for (int j = 0; j < n; ++j) {
    if (int(c[std::size_t(j)].size()) != m)
      throw InvalidInputError("cost row has wrong size");
    for (int i = 0; i < m; ++i) {
      const double v = c[std::size_t(j)][std::size_t(i)];
      if (!std::isfinite(v) || v < 0.0)
        throw InvalidInputError("connection costs must be finite and nonnegative");
    }
    if (r[std::size_t(j)] < 1)
      throw InvalidInputError("requirements must be at least 1");
    if (r[std::size_t(j)] > m)
      throw InfeasibleError("client " + std::to_string(j) + " requires " +
                            std::to_string(r[std::size_t(j)]) +
                            " distinct facilities but only " +
                            std::to_string(m) + " exist");
  }
}

// ---------- text format ----------

Instance parse_instance(const std::string& text) {
  Tokenizer tk{text};

  const auto magic = tk.require("format magic");
  if (magic != "FTFL")
    throw ParseError("expected magic 'FTFL', got '" + std::string(magic) + "'",
                     tk.token_line);
  const auto version = tk.require("format version");
  if (version != "1")
    throw ParseError("unsupported version '" + std::string(version) + "'",
                     tk.token_line);

  Instance inst;
  inst.m = require_int(tk, "facility count");
  inst.n = require_int(tk, "client count");
  if (inst.m < 1) throw ParseError("facility count must be positive", tk.token_line);
  if (inst.n < 1) throw ParseError("client count must be positive", tk.token_line);

  inst.f.resize(std::size_t(inst.m));
  for (int i = 0; i < inst.m; ++i) {
    inst.f[std::size_t(i)] = require_double(tk, "opening cost");
    if (inst.f[std::size_t(i)] < 0.0)
      throw ParseError("opening cost must be nonnegative", tk.token_line);
  }

  inst.c.assign(std::size_t(inst.n), std::vector<double>(std::size_t(inst.m)));
  inst.r.resize(std::size_t(inst.n));
  for (int j = 0; j < inst.n; ++j) {
    const int rj = require_int(tk, "requirement");
    if (rj < 1) throw ParseError("requirement must be at least 1", tk.token_line);
    if (rj > inst.m)
      throw InfeasibleError("line " + std::to_string(tk.token_line) + ": client " +
                            std::to_string(j) + " requires " + std::to_string(rj) +
                            " distinct facilities but only " +
                            std::to_string(inst.m) + " exist");
    inst.r[std::size_t(j)] = rj;
    for (int i = 0; i < inst.m; ++i) {
      const double v = require_double(tk, "connection cost");
      if (v < 0.0)
        throw ParseError("connection cost must be nonnegative", tk.token_line);
      inst.c[std::size_t(j)][std::size_t(i)] = v;
    }
  }

  if (auto extra = tk.next())
    throw ParseError("unexpected trailing token '" + std::string(*extra) + "'",
                     tk.token_line);

  inst.validate();
  return inst;
}

Instance parse_instance(std::istream& in) {
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_instance(ss.str());
}

std::string serialize_instance(const Instance& inst) {
  inst.validate();
  std::string out;
  out += "FTFL 1\n";
  out += std::to_string(inst.m) + " " + std::to_string(inst.n) + "\n";
  for (int i = 0; i < inst.m; ++i) {
    if (i > 0) out += ' ';
    out += fmt_double(inst.f[std::size_t(i)]);
  }
  out += '\n';
  for (int j = 0; j < inst.n; ++j) {
    out += std::to_string(inst.r[std::size_t(j)]);
    for (int i = 0; i < inst.m; ++i) {
      out += ' ';
      out += fmt_double(inst.c[std::size_t(j)][std::size_t(i)]);
    }
    out += '\n';
  }
  return out;
}

// ---------- metric check ----------

MetricReport validate_metric(const Instance& inst, double tol) {
  MetricReport rep;
  for (int j = 0; j < inst.n; ++j) {
    for (int i = 0; i < inst.m; ++i) {
      for (int j2 = 0; j2 < inst.n; ++j2) {
        if (j2 == j) continue;
        for (int i2 = 0; i2 < inst.m; ++i2) {
          if (i2 == i) continue;
          const double lhs = inst.cost(j, i);
          const double rhs =
              inst.cost(j, i2) + inst.cost(j2, i2) + inst.cost(j2, i);
          if (lhs > rhs + tol)
            rep.violations.push_back({i, j, i2, j2, lhs, rhs});
        }
      }
    }
  }
  return rep;
}

// ---------- generators ----------

Instance generate(GenMode mode, int m, int n, int r_max, std::uint64_t seed) {
  if (m < 1 || n < 1) throw InvalidInputError("generate: need m >= 1 and n >= 1");
  if (r_max < 1 || r_max > m)
    throw InvalidInputError("generate: need 1 <= r_max <= m, got r_max=" +
                            std::to_string(r_max) + " with m=" + std::to_string(m));

  Rng rng = Rng::derive(seed, std::uint64_t(mode));
  Instance inst;
  inst.m = m;
  inst.n = n;
  inst.c.assign(std::size_t(n), std::vector<double>(std::size_t(m)));

  if (mode == GenMode::euclidean) {
    auto fac = std::vector<std::pair<double, double>>(std::size_t(m));
    auto cli = std::vector<std::pair<double, double>>(std::size_t(n));
    for (auto& p : fac) p = {rng.uniform01(), rng.uniform01()};
    for (auto& p : cli) p = {rng.uniform01(), rng.uniform01()};
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < m; ++i)
        inst.c[std::size_t(j)][std::size_t(i)] =
            std::hypot(cli[std::size_t(j)].first - fac[std::size_t(i)].first,
                       cli[std::size_t(j)].second - fac[std::size_t(i)].second);
  } else {
    // Complete graph on m+n nodes (facilities first), random edge weights,
    // Floyd-Warshall closure; costs are facility-to-client distances.
    const int nodes = m + n;
    std::vector<std::vector<double>> d(std::size_t(nodes),
                                       std::vector<double>(std::size_t(nodes), 0.0));
    for (int u = 0; u < nodes; ++u)
      for (int v = u + 1; v < nodes; ++v)
        d[std::size_t(u)][std::size_t(v)] = d[std::size_t(v)][std::size_t(u)] =
            rng.uniform01();
    for (int k = 0; k < nodes; ++k)
      for (int u = 0; u < nodes; ++u)
        for (int v = 0; v < nodes; ++v) {
          const double via = d[std::size_t(u)][std::size_t(k)] +
                             d[std::size_t(k)][std::size_t(v)];
          if (via < d[std::size_t(u)][std::size_t(v)])
            d[std::size_t(u)][std::size_t(v)] = via;
        }
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < m; ++i)
        inst.c[std::size_t(j)][std::size_t(i)] = d[std::size_t(m + j)][std::size_t(i)];
  }

  inst.f.resize(std::size_t(m));
  for (int i = 0; i < m; ++i) inst.f[std::size_t(i)] = rng.uniform01();
  inst.r.resize(std::size_t(n));
  for (int j = 0; j < n; ++j) inst.r[std::size_t(j)] = rng.uniform_int(1, r_max);

  inst.validate();
  return inst;
}

}  // namespace ftfl
