#include "mrfl/io.hpp"

#include <algorithm>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>

namespace mrfl::io {

using nlohmann::json;

json graph_to_json(const Graph& g) {
  json edges = json::array();
  for (auto [a, b] : g.edges()) edges.push_back({a, b});
  return {{"p", g.num_nodes()}, {"edges", edges}};
}

Graph graph_from_json(const json& j) {
  std::vector<Edge> edges;
  for (const auto& e : j.at("edges")) edges.emplace_back(e.at(0).get<int>(), e.at(1).get<int>());
  return Graph(j.at("p").get<int>(), std::move(edges));
}

json model_to_json(const IsingModel& m) {
  json edges = json::array();
  const auto& es = m.graph().edges();
  for (std::size_t k = 0; k < es.size(); ++k) edges.push_back({es[k].first, es[k].second, m.couplings()[k]});
  std::vector<double> h(m.fields().data(), m.fields().data() + m.fields().size());
  return {{"p", m.num_nodes()}, {"edges", edges}, {"h", h}};
}

IsingModel model_from_json(const json& j) {
  const int p = j.at("p").get<int>();
  struct Row {
    Edge e;
    double coupling;
  };
  std::vector<Row> rows;
  for (const auto& e : j.at("edges")) {
    Node a = e.at(0).get<int>(), b = e.at(1).get<int>();
    if (a > b) std::swap(a, b);
    rows.push_back({{a, b}, e.at(2).get<double>()});
  }
  std::sort(rows.begin(), rows.end(), [](const Row& x, const Row& y) { return x.e < y.e; });
  std::vector<Edge> edges;
  std::vector<double> couplings;
  for (const auto& r : rows) {
    edges.push_back(r.e);
    couplings.push_back(r.coupling);
  }
  Eigen::VectorXd h = Eigen::VectorXd::Zero(p);
  if (j.contains("h")) {
    const auto hv = j.at("h").get<std::vector<double>>();
    if (static_cast<int>(hv.size()) != p) throw std::invalid_argument("model JSON: h must have p entries");
    for (int i = 0; i < p; ++i) h(i) = hv[static_cast<std::size_t>(i)];
  }
  return IsingModel(Graph(p, std::move(edges)), std::move(couplings), std::move(h));
}

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  return json::parse(in);
}

void write_json_file(const std::string& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << j.dump(2) << '\n';
}

void write_samples_csv(std::ostream& os, const SampleSet& s, std::optional<std::uint64_t> seed) {
  if (seed) os << "# p=" << s.num_nodes() << " n=" << s.num_samples() << " seed=" << *seed << '\n';
  std::string line;
  for (Eigen::Index r = 0; r < s.data.rows(); ++r) {
    line.clear();
    for (Eigen::Index c = 0; c < s.data.cols(); ++c) {
      if (c) line += ',';
      const int v = s.data(r, c);
      line += std::to_string(s.spins ? index_to_spin(v) : v);
    }
    line += '\n';
    os << line;
  }
}

SampleSet read_samples_csv(std::istream& is, std::optional<int> alphabet) {
  std::vector<std::vector<int>> rows;
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::vector<int> row;
    std::istringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) {
      std::size_t used = 0;
      const int v = std::stoi(cell, &used);
      if (cell.find_first_not_of(" \t\r", used) != std::string::npos)
        throw std::runtime_error("sample CSV: bad entry '" + cell + "'");
      row.push_back(v);
    }
    if (!rows.empty() && row.size() != rows.front().size()) throw std::runtime_error("sample CSV: ragged rows");
    rows.push_back(std::move(row));
  }
  if (rows.empty() || rows.front().empty()) throw std::runtime_error("sample CSV: no data");
  bool spins = true;
  int top = 0;
  for (const auto& r : rows)
    for (int v : r) {
      if (v != 1 && v != -1) spins = false;
      if (v < -1) throw std::runtime_error("sample CSV: negative entry");
      top = std::max(top, v);
    }
  if (spins && alphabet && *alphabet != 2) spins = false;
  SampleMatrix data(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.front().size()));
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (std::size_t c = 0; c < rows[r].size(); ++c) {
      const int v = rows[r][c];
      if (!spins && v < 0) throw std::runtime_error("sample CSV: -1 mixed with non-spin values");
      data(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
          static_cast<std::uint8_t>(spins ? spin_to_index(v) : v);
    }
  const int k = spins ? 2 : alphabet.value_or(std::max(top + 1, 2));
  return SampleSet(std::move(data), k, spins);
}

namespace {

std::string join(const NodeSet& s) {
  std::string out;
  for (std::size_t k = 0; k < s.size(); ++k) {
    if (k) out += ';';
    out += std::to_string(s[k]);
  }
  return out;
}

NodeSet split(const std::string& s) {
  NodeSet out;
  std::istringstream ls(s);
  std::string tok;
  while (std::getline(ls, tok, ';'))
    if (!tok.empty()) out.push_back(std::stoi(tok));
  return out;
}

}  // namespace

void write_scores_csv(std::ostream& os, const ScoreMatrix& m) {
  os << "i,j,score,S,T\n" << std::setprecision(17);
  const int p = m.num_nodes();
  for (Node i = 0; i < p; ++i)
    for (Node j = i + 1; j < p; ++j) {
      const auto& w = m.witness(i, j);
      os << i << ',' << j << ',' << m(i, j) << ',' << join(w.separator) << ',' << join(w.breaker) << '\n';
    }
}

ScoreMatrix read_scores_csv(std::istream& is, std::optional<int> p) {
  std::string line;
  if (!std::getline(is, line) || (line != "i,j,score,S,T" && line != "i,j,score,S,T\r"))
    throw std::runtime_error("score CSV: bad header");
  struct Row {
    Node i, j;
    MaxMinResult r;
  };
  std::vector<Row> rows;
  int top = -1;
  while (std::getline(is, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::istringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    if (line.back() == ',') cells.emplace_back();
    if (cells.size() < 3 || cells.size() > 5) throw std::runtime_error("score CSV: malformed row: " + line);
    cells.resize(5);
    Row row{std::stoi(cells[0]), std::stoi(cells[1]), {}};
    row.r.score = std::stod(cells[2]);
    row.r.separator = split(cells[3]);
    row.r.breaker = split(cells[4]);
    top = std::max({top, row.i, row.j});
    rows.push_back(std::move(row));
  }
  const int nodes = p.value_or(top + 1);
  ScoreMatrix out(nodes, 0, 0, TestKind::MutualInformation, "file");
  for (auto& row : rows) {
    if (row.i < 0 || row.j < 0 || row.i >= nodes || row.j >= nodes)
      throw std::runtime_error("score CSV: node id out of range");
    out.set(row.i, row.j, std::move(row.r));
  }
  return out;
}

}  // namespace mrfl::io
