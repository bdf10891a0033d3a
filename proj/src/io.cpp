#include "blackout/io.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace blackout {

namespace {

int parse_field(const std::string& header, const std::string& key) {
  const auto pos = header.find(key + "=");
  if (pos == std::string::npos)
    throw std::runtime_error("missing header field " + key);
  return std::stoi(header.substr(pos + key.size() + 1));
}

}  // namespace

DiscreteDataset load_dataset(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_dataset: cannot open " + path);
  std::string header;
  std::getline(in, header);
  if (header.rfind("BDDATA", 0) != 0)
    throw std::runtime_error("load_dataset: bad header in " + path);
  const int M = parse_field(header, "M");
  const int N = parse_field(header, "N");
  std::vector<std::vector<int>> items;
  std::vector<double> weights;
  bool any_weight = false;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    double w = 1.0;
    const auto bar = line.find('|');
    if (bar != std::string::npos) {
      w = std::stod(line.substr(bar + 1));
      line.resize(bar);
      any_weight = true;
    }
    std::istringstream ls(line);
    std::vector<int> item;
    int x;
    while (ls >> x) item.push_back(x);
    if (static_cast<int>(item.size()) != N)
      throw std::runtime_error("load_dataset: wrong component count");
    items.push_back(std::move(item));
    weights.push_back(w);
  }
  if (!any_weight) weights.clear();
  return DiscreteDataset(StateSpace(M, N), std::move(items), std::move(weights));
}

void save_dataset(const DiscreteDataset& ds, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("save_dataset: cannot open " + path);
  out << "BDDATA M=" << ds.space.max_label << " N=" << ds.space.dims << "\n";
  out.precision(17);
  for (std::size_t j = 0; j < ds.items.size(); ++j) {
    for (int i = 0; i < ds.space.dims; ++i) {
      if (i) out << ' ';
      out << ds.items[j][i];
    }
    out << " | " << ds.weights[j] << "\n";
  }
}

void save_samples(const std::vector<std::vector<int>>& samples,
                  const StateSpace& space, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("save_samples: cannot open " + path);
  out << "BDSAMPLES M=" << space.max_label << " N=" << space.dims
      << " COUNT=" << samples.size() << "\n";
  for (const auto& sample : samples) {
    for (std::size_t i = 0; i < sample.size(); ++i) {
      if (i) out << ' ';
      out << sample[i];
    }
    out << "\n";
  }
}

std::pair<StateSpace, std::vector<std::vector<int>>> load_samples(
    const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_samples: cannot open " + path);
  std::string header;
  std::getline(in, header);
  if (header.rfind("BDSAMPLES", 0) != 0)
    throw std::runtime_error("load_samples: bad header in " + path);
  const int M = parse_field(header, "M");
  const int N = parse_field(header, "N");
  const int count = parse_field(header, "COUNT");
  std::vector<std::vector<int>> samples;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::vector<int> s;
    int x;
    while (ls >> x) s.push_back(x);
    if (static_cast<int>(s.size()) != N)
      throw std::runtime_error("load_samples: wrong component count");
    samples.push_back(std::move(s));
  }
  if (static_cast<int>(samples.size()) != count)
    throw std::runtime_error("load_samples: COUNT mismatch");
  return {StateSpace(M, N), std::move(samples)};
}

void save_pgm(const std::vector<int>& sample, const StateSpace& space,
              const std::string& path) {
  const int side = static_cast<int>(std::lround(std::sqrt(space.dims)));
  if (side * side != space.dims)
    throw std::invalid_argument("save_pgm: dims is not a perfect square");
  std::ofstream out(path);
  if (!out) throw std::runtime_error("save_pgm: cannot open " + path);
  out << "P2\n" << side << ' ' << side << "\n" << space.max_label << "\n";
  for (int row = 0; row < side; ++row) {
    for (int col = 0; col < side; ++col) {
      if (col) out << ' ';
      out << sample[row * side + col];
    }
    out << "\n";
  }
}

}  // namespace blackout
