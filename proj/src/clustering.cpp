#include "csikit/clustering.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <functional>
#include <map>
#include <nlohmann/json.hpp>
#include <numeric>

#include "csikit/errors.hpp"

namespace csikit {

const char* algorithm_name(Algorithm a) {
  switch (a) {
    case Algorithm::kmeans: return "kmeans";
    case Algorithm::hierarchical: return "hierarchical";
    case Algorithm::som: return "som";
    case Algorithm::dbscan: return "dbscan";
  }
  return "unknown";
}

std::size_t ClusterAssignment::n_noise() const {
  return static_cast<std::size_t>(std::count(labels.begin(), labels.end(), -1));
}

std::vector<std::size_t> ClusterAssignment::cluster_sizes() const {
  std::vector<std::size_t> sizes(static_cast<std::size_t>(k), 0);
  for (int l : labels)
    if (l >= 0) ++sizes[static_cast<std::size_t>(l)];
  return sizes;
}

int relabel_by_size(std::vector<int>& labels, int k) {
  std::vector<std::size_t> sizes(static_cast<std::size_t>(k), 0);
  for (int l : labels)
    if (l >= 0) ++sizes[static_cast<std::size_t>(l)];

  std::vector<int> order(static_cast<std::size_t>(k));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return sizes[static_cast<std::size_t>(a)] > sizes[static_cast<std::size_t>(b)];
  });

  std::vector<int> remap(static_cast<std::size_t>(k), -1);
  int next = 0;
  for (int old : order)
    if (sizes[static_cast<std::size_t>(old)] > 0) remap[static_cast<std::size_t>(old)] = next++;

  for (int& l : labels)
    if (l >= 0) l = remap[static_cast<std::size_t>(l)];
  return next;
}

std::vector<int> Dendrogram::cut(std::size_t k) const {
  const std::size_t n = leaves;
  if (k < 1 || k > n) raise(errc::k_out_of_range, "cut k must be in [1, leaves]");

  // Union-find over node ids, replaying the first n-k merges.
  std::vector<int> parent(n + merges.size());
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int x) {
    while (parent[static_cast<std::size_t>(x)] != x) {
      parent[static_cast<std::size_t>(x)] = parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(x)])];
      x = parent[static_cast<std::size_t>(x)];
    }
    return x;
  };
  for (std::size_t s = 0; s + k < n; ++s) {
    const int node = static_cast<int>(n + s);
    parent[static_cast<std::size_t>(find(merges[s].left))] = node;
    parent[static_cast<std::size_t>(find(merges[s].right))] = node;
  }

  std::vector<int> labels(n, -1);
  for (std::size_t i = 0; i < n; ++i) labels[i] = find(static_cast<int>(i));
  // Number clusters by lowest member row.
  std::map<int, int> first_row;
  for (std::size_t i = 0; i < n; ++i)
    if (!first_row.count(labels[i])) first_row[labels[i]] = static_cast<int>(i);
  std::vector<std::pair<int, int>> by_first;  // (first row, root)
  for (const auto& [root, row] : first_row) by_first.emplace_back(row, root);
  std::sort(by_first.begin(), by_first.end());
  std::map<int, int> final_label;
  for (std::size_t c = 0; c < by_first.size(); ++c) final_label[by_first[c].second] = static_cast<int>(c);
  for (int& l : labels) l = final_label[l];
  return labels;
}

nlohmann::json Dendrogram::to_json(std::span<const std::string> leaf_ids) const {
  nlohmann::json j;
  j["leaves"] = leaves;
  j["leaf_ids"] = std::vector<std::string>(leaf_ids.begin(), leaf_ids.end());
  nlohmann::json ms = nlohmann::json::array();
  for (const auto& m : merges)
    ms.push_back({{"left", m.left}, {"right", m.right}, {"distance", m.distance}, {"size", m.size}});
  j["merges"] = ms;
  return j;
}

namespace {

std::string format_height(double v) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::string sanitize_newick(const std::string& id) {
  std::string out;
  out.reserve(id.size());
  for (char c : id) out += (std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '.') ? c : '_';
  return out;
}

}  // namespace

std::string Dendrogram::to_newick(std::span<const std::string> leaf_ids) const {
  const std::size_t n = leaves;
  // Height of each node: leaves 0, merge node its distance.
  auto height = [&](int node) {
    return node < static_cast<int>(n) ? 0.0 : merges[static_cast<std::size_t>(node) - n].distance;
  };
  // Recursive build; iterative stack not needed at these sizes.
  std::function<std::string(int)> build = [&](int node) -> std::string {
    if (node < static_cast<int>(n)) return sanitize_newick(leaf_ids[static_cast<std::size_t>(node)]);
    const auto& m = merges[static_cast<std::size_t>(node) - n];
    const double h = m.distance;
    return "(" + build(m.left) + ":" + format_height(h - height(m.left)) + "," + build(m.right) +
           ":" + format_height(h - height(m.right)) + ")";
  };
  if (n == 0) return ";";
  if (merges.empty()) return sanitize_newick(leaf_ids[0]) + ";";
  return build(static_cast<int>(n + merges.size() - 1)) + ";";
}

}  // namespace csikit
