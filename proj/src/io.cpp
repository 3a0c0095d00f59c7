#include "surfsig/io.hpp"

#include <charconv>
#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>
#include <utility>
#include <vector>

#include "json.hpp"
#include "surfsig/errors.hpp"

namespace surfsig {

namespace {

using Line = std::pair<int, std::string>;

std::string trim(const std::string& s) {
  const size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  const size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

// non-blank, non-comment lines with their numbers
std::vector<Line> read_lines(std::istream& is) {
  std::vector<Line> out;
  std::string s;
  int no = 0;
  while (std::getline(is, s)) {
    ++no;
    s = trim(s);
    if (s.empty() || s[0] == '#') continue;
    out.emplace_back(no, s);
  }
  return out;
}

[[noreturn]] void fail(const std::string& source, int line, const std::string& msg) {
  throw ParseError(source + ":" + std::to_string(line) + ": " + msg);
}

std::vector<std::string> split(const std::string& s, char sep = ',') {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream ss(s);
  while (std::getline(ss, cur, sep)) out.push_back(trim(cur));
  if (!s.empty() && s.back() == sep) out.emplace_back();
  return out;
}

double parse_double(const std::string& f, const std::string& source, int line) {
  double x = 0.0;
  const char* b = f.data();
  const char* e = b + f.size();
  if (b != e && *b == '+') ++b;
  auto [p, ec] = std::from_chars(b, e, x);
  if (ec != std::errc() || p != e || f.empty()) fail(source, line, "not a number: '" + f + "'");
  return x;
}

long parse_int(const std::string& f, const std::string& source, int line) {
  long x = 0;
  auto [p, ec] = std::from_chars(f.data(), f.data() + f.size(), x);
  if (ec != std::errc() || p != f.data() + f.size() || f.empty()) fail(source, line, "not an integer: '" + f + "'");
  return x;
}

const char* grid_header = "d,n_s,n_t,s_min,s_max,t_min,t_max";

// header tokens key=value
std::map<std::string, std::string> parse_header(const Line& l, const std::string& source) {
  std::map<std::string, std::string> kv;
  std::istringstream ss(l.second);
  std::string tok;
  while (ss >> tok) {
    const size_t eq = tok.find('=');
    if (eq == std::string::npos) fail(source, l.first, "expected key=value in header, got '" + tok + "'");
    kv[tok.substr(0, eq)] = tok.substr(eq + 1);
  }
  return kv;
}

std::pair<int, int> header_dims(const std::map<std::string, std::string>& kv, const std::string& source, int line) {
  if (!kv.count("d") || !kv.count("N")) fail(source, line, "header needs d=<d> N=<N>");
  const long d = parse_int(kv.at("d"), source, line), N = parse_int(kv.at("N"), source, line);
  if (d < 1 || d > 9) fail(source, line, "d must lie in [1, 9]");
  if (N < 0 || N > 12) fail(source, line, "N must lie in [0, 12]");
  return {static_cast<int>(d), static_cast<int>(N)};
}

GradedTensor0 parse_tensor(const std::vector<Line>& lines, const std::string& source, int empty_line) {
  if (lines.empty()) fail(source, empty_line, "missing tensor header");
  const auto [d, N] = header_dims(parse_header(lines[0], source), source, lines[0].first);
  GradedTensor0 a(d, N);
  std::set<std::pair<int, std::string>> seen;
  for (size_t k = 1; k < lines.size(); ++k) {
    const int no = lines[k].first;
    const auto f = split(lines[k].second);
    if (f.size() != 3) fail(source, no, "expected level,word,coefficient");
    const long n = parse_int(f[0], source, no);
    if (n < 0 || n > N) fail(source, no, "level out of range");
    if (static_cast<long>(f[1].size()) != n) fail(source, no, "word length differs from the level");
    for (char ch : f[1])
      if (ch < '1' || ch > static_cast<char>('0' + d)) fail(source, no, "letter out of range in '" + f[1] + "'");
    if (!seen.insert({static_cast<int>(n), f[1]}).second) fail(source, no, "duplicate coefficient for '" + f[1] + "'");
    a.coeff(f[1]) = parse_double(f[2], source, no);
  }
  return a;
}

Tensor1Hat parse_tensor1(const std::vector<Line>& lines, const std::string& source, int empty_line) {
  if (lines.empty()) fail(source, empty_line, "missing tensor header");
  const auto kv = parse_header(lines[0], source);
  const auto [d, N] = header_dims(kv, source, lines[0].first);
  if (N < 2) fail(source, lines[0].first, "N must be at least 2");
  Tensor1Hat E = Tensor1Hat::one(d, N);
  if (kv.count("unit")) E.unit = parse_double(kv.at("unit"), source, lines[0].first);
  std::set<std::pair<long, long>> seen;
  for (size_t k = 1; k < lines.size(); ++k) {
    const int no = lines[k].first;
    const auto f = split(lines[k].second);
    if (f.size() != 3) fail(source, no, "expected level,index,coefficient");
    const long n = parse_int(f[0], source, no), i = parse_int(f[1], source, no);
    if (n < 2 || n > N) fail(source, no, "level out of range");
    if (i < 0 || i >= E.body.level(n).size()) fail(source, no, "index out of range");
    if (!seen.insert({n, i}).second) fail(source, no, "duplicate coefficient");
    E.body.level(n)[i] = parse_double(f[2], source, no);
  }
  return E;
}

}  // namespace

std::string format_number(double x) {
  char buf[64];
  auto [p, ec] = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, p);
}

SurfaceGrid read_grid(std::istream& is, const std::string& source) {
  const std::vector<Line> lines = read_lines(is);
  if (lines.empty()) fail(source, 1, "empty grid file");
  size_t k = 0;
  if (split(lines[0].second) == split(grid_header)) ++k;
  if (k >= lines.size()) fail(source, lines[0].first, "missing grid parameters");
  const int hl = lines[k].first;
  const auto h = split(lines[k].second);
  if (h.size() != 7) fail(source, hl, std::string("expected ") + grid_header);
  const long d = parse_int(h[0], source, hl), ns = parse_int(h[1], source, hl), nt = parse_int(h[2], source, hl);
  const Rect dom{parse_double(h[3], source, hl), parse_double(h[4], source, hl), parse_double(h[5], source, hl),
                 parse_double(h[6], source, hl)};
  if (d < 1) fail(source, hl, "d must be at least 1");
  if (ns < 1 || nt < 1 || ns > 4096 || nt > 4096) fail(source, hl, "n_s and n_t must lie in [1, 4096]");
  if (!(dom.s2 > dom.s1) || !(dom.t2 > dom.t1)) fail(source, hl, "parameter ranges must be increasing");
  SurfaceGrid g(static_cast<int>(d), static_cast<int>(ns), static_cast<int>(nt), dom);
  std::vector<char> seen(static_cast<size_t>((ns + 1) * (nt + 1)), 0);
  for (++k; k < lines.size(); ++k) {
    const int no = lines[k].first;
    const auto f = split(lines[k].second);
    if (static_cast<long>(f.size()) != d + 2) fail(source, no, "expected i,j and " + std::to_string(d) + " values");
    const long i = parse_int(f[0], source, no), j = parse_int(f[1], source, no);
    if (i < 0 || i > ns || j < 0 || j > nt) fail(source, no, "sample index out of range");
    char& s = seen[static_cast<size_t>(j * (ns + 1) + i)];
    if (s) fail(source, no, "duplicate sample (" + f[0] + "," + f[1] + ")");
    s = 1;
    for (long c = 0; c < d; ++c) g.at(static_cast<int>(i), static_cast<int>(j))[c] = parse_double(f[c + 2], source, no);
  }
  for (long j = 0; j <= nt; ++j)
    for (long i = 0; i <= ns; ++i)
      if (!seen[static_cast<size_t>(j * (ns + 1) + i)])
        fail(source, lines.back().first, "missing sample (" + std::to_string(i) + "," + std::to_string(j) + ")");
  return g;
}

void write_grid(std::ostream& os, const SurfaceGrid& g) {
  const Rect& r = g.domain();
  os << grid_header << '\n'
     << g.dim() << ',' << g.ns() << ',' << g.nt() << ',' << format_number(r.s1) << ',' << format_number(r.s2) << ','
     << format_number(r.t1) << ',' << format_number(r.t2) << '\n';
  for (int j = 0; j <= g.nt(); ++j)
    for (int i = 0; i <= g.ns(); ++i) {
      os << i << ',' << j;
      for (int c = 0; c < g.dim(); ++c) os << ',' << format_number(g.at(i, j)[c]);
      os << '\n';
    }
}

PiecewiseLinearPath read_path(std::istream& is, const std::string& source) {
  const std::vector<Line> lines = read_lines(is);
  std::vector<double> u;
  std::vector<Eigen::VectorXd> x;
  size_t width = 0;
  for (const Line& l : lines) {
    const auto f = split(l.second);
    if (f.size() < 2) fail(source, l.first, "expected u,v1,...,vd");
    if (width == 0) width = f.size();
    if (f.size() != width) fail(source, l.first, "sample has " + std::to_string(f.size() - 1) + " coordinates, expected " +
                                                 std::to_string(width - 1));
    const double uu = parse_double(f[0], source, l.first);
    if (!u.empty() && !(uu > u.back())) fail(source, l.first, "parameter not strictly increasing");
    Eigen::VectorXd v(static_cast<long>(width - 1));
    for (size_t c = 1; c < width; ++c) v[static_cast<long>(c - 1)] = parse_double(f[c], source, l.first);
    u.push_back(uu);
    x.push_back(std::move(v));
  }
  if (u.size() < 2) fail(source, lines.empty() ? 1 : lines.back().first, "a path needs at least two samples");
  return PiecewiseLinearPath(std::move(u), std::move(x));
}

void write_path(std::ostream& os, const PiecewiseLinearPath& p) {
  for (size_t k = 0; k < p.size(); ++k) {
    os << format_number(p.params()[k]);
    for (long c = 0; c < p.points()[k].size(); ++c) os << ',' << format_number(p.points()[k][c]);
    os << '\n';
  }
}

void write_tensor(std::ostream& os, const GradedTensor0& a) {
  const int d = a.dim();
  if (d > 9) throw DomainError("word strings need d <= 9");
  os << "d=" << d << " N=" << a.cap() << '\n';
  for (int n = 0; n <= a.cap(); ++n)
    for (long i = 0; i < a.level(n).size(); ++i)
      os << n << ',' << word_string(d, n, i) << ',' << format_number(a.level(n)[i]) << '\n';
}

GradedTensor0 read_tensor(std::istream& is, const std::string& source) {
  return parse_tensor(read_lines(is), source, 1);
}

void write_tensor1(std::ostream& os, const Tensor1Hat& E) {
  os << "d=" << E.dim() << " N=" << E.cap() << " unit=" << format_number(E.unit) << '\n';
  for (int n = 2; n <= E.cap(); ++n)
    for (long i = 0; i < E.body.level(n).size(); ++i)
      os << n << ',' << i << ',' << format_number(E.body.level(n)[i]) << '\n';
}

Tensor1Hat read_tensor1(std::istream& is, const std::string& source) {
  return parse_tensor1(read_lines(is), source, 1);
}

void write_frame(std::ostream& os, int d, int N) {
  const PeifferCache& cache = build_cache(d, N);
  os << "level,column,bar_index,bar_word,value\n";
  for (int n = 2; n <= N; ++n) {
    const PeifferLevel& L = cache.level(n);
    for (long c = 0; c < L.dim; ++c)
      for (long b = 0; b < L.bar_dim; ++b) {
        const double v = L.identity ? (b == c ? 1.0 : 0.0) : L.frame(b, c);
        if (v == 0.0) continue;
        os << n << ',' << c << ',' << b << ',' << bar::label(d, n, b) << ',' << format_number(v) << '\n';
      }
  }
}

void write_square(std::ostream& os, const Square& S) {
  const std::pair<const char*, const GradedTensor0*> edges[] = {{"x", &S.x}, {"y", &S.y}, {"z", &S.z}, {"w", &S.w}};
  for (const auto& [name, t] : edges) {
    os << '[' << name << "]\n";
    write_tensor(os, *t);
  }
  os << "[E]\n";
  write_tensor1(os, S.E);
}

Square read_square(std::istream& is, const std::string& source) {
  const std::vector<Line> lines = read_lines(is);
  std::map<std::string, std::vector<Line>> sec;
  std::map<std::string, int> at;
  std::string cur;
  for (const Line& l : lines) {
    if (l.second.front() == '[') {
      if (l.second.back() != ']') fail(source, l.first, "malformed section header");
      cur = l.second.substr(1, l.second.size() - 2);
      if (cur != "x" && cur != "y" && cur != "z" && cur != "w" && cur != "E")
        fail(source, l.first, "unknown section '" + cur + "'");
      if (at.count(cur)) fail(source, l.first, "duplicate section '" + cur + "'");
      at[cur] = l.first;
      sec[cur];
      continue;
    }
    if (cur.empty()) fail(source, l.first, "data before the first section");
    sec[cur].push_back(l);
  }
  for (const char* name : {"x", "y", "z", "w", "E"})
    if (!at.count(name)) fail(source, lines.empty() ? 1 : lines.back().first, std::string("missing section [") + name + "]");
  Square S;
  S.x = parse_tensor(sec["x"], source, at["x"]);
  S.y = parse_tensor(sec["y"], source, at["y"]);
  S.z = parse_tensor(sec["z"], source, at["z"]);
  S.w = parse_tensor(sec["w"], source, at["w"]);
  S.E = parse_tensor1(sec["E"], source, at["E"]);
  return S;
}

namespace {

Eigen::MatrixXd json_matrix(const nlohmann::json& j, int rows, int cols, const std::string& what) {
  if (!j.is_array() || static_cast<int>(j.size()) != rows) throw ParseError(what + ": expected " + std::to_string(rows) + " rows");
  Eigen::MatrixXd M(rows, cols);
  for (int r = 0; r < rows; ++r) {
    if (!j[r].is_array() || static_cast<int>(j[r].size()) != cols)
      throw ParseError(what + ": row " + std::to_string(r + 1) + " needs " + std::to_string(cols) + " entries");
    for (int c = 0; c < cols; ++c) {
      if (!j[r][c].is_number()) throw ParseError(what + ": non-numeric entry");
      M(r, c) = j[r][c].get<double>();
    }
  }
  return M;
}

nlohmann::json matrix_json(const Eigen::MatrixXd& M) {
  nlohmann::json a = nlohmann::json::array();
  for (long r = 0; r < M.rows(); ++r) {
    nlohmann::json row = nlohmann::json::array();
    for (long c = 0; c < M.cols(); ++c) row.push_back(M(r, c));
    a.push_back(row);
  }
  return a;
}

std::string wedge_key(int i, int j) { return std::to_string(i + 1) + "^" + std::to_string(j + 1); }

}  // namespace

ChainConnection read_connection(std::istream& is, const std::string& source) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(is);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(source + ": " + e.what());
  }
  auto get_int = [&](const char* k) {
    if (!j.contains(k) || !j[k].is_number_integer()) throw ParseError(source + ": missing integer '" + k + "'");
    return j[k].get<int>();
  };
  ChainConnection c;
  c.tvs = {get_int("n"), get_int("m"), get_int("p")};
  c.d = get_int("d");
  validate(c.tvs);
  if (c.d < 1 || c.d > 9) throw DomainError("connection dimension must lie in [1, 9]");
  for (const char* k : {"beta", "alpha", "gamma"})
    if (!j.contains(k) || !j[k].is_object()) throw ParseError(source + ": missing object '" + k + "'");
  const int n0 = c.tvs.dim0(), n1 = c.tvs.dim1();
  for (int i = 0; i < c.d; ++i) {
    const std::string key = std::to_string(i + 1);
    if (!j["beta"].contains(key) || !j["alpha"].contains(key))
      throw ParseError(source + ": missing letter block '" + key + "'");
    c.beta.push_back(json_matrix(j["beta"][key], n0, n0, source + ": beta " + key));
    c.alpha.push_back(json_matrix(j["alpha"][key], n1, n1, source + ": alpha " + key));
  }
  c.gamma.resize(bar::pairs(c.d));
  for (int a = 0; a < c.d; ++a)
    for (int b = a + 1; b < c.d; ++b) {
      const std::string key = wedge_key(a, b);
      if (!j["gamma"].contains(key)) throw ParseError(source + ": missing wedge block '" + key + "'");
      c.gamma[bar::pair_index(c.d, a, b)] = json_matrix(j["gamma"][key], n1, n0, source + ": gamma " + key);
    }
  validate(c, 1e-8);
  return c;
}

void write_connection(std::ostream& os, const ChainConnection& c) {
  nlohmann::json j;
  j["n"] = c.tvs.n;
  j["m"] = c.tvs.m;
  j["p"] = c.tvs.p;
  j["d"] = c.d;
  j["beta"] = nlohmann::json::object();
  j["alpha"] = nlohmann::json::object();
  j["gamma"] = nlohmann::json::object();
  for (int i = 0; i < c.d; ++i) {
    j["beta"][std::to_string(i + 1)] = matrix_json(c.beta[i]);
    j["alpha"][std::to_string(i + 1)] = matrix_json(c.alpha[i]);
  }
  for (int a = 0; a < c.d; ++a)
    for (int b = a + 1; b < c.d; ++b) j["gamma"][wedge_key(a, b)] = matrix_json(c.gamma[bar::pair_index(c.d, a, b)]);
  os << j.dump(2) << '\n';
}

}  // namespace surfsig
