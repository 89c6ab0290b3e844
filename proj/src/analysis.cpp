#include "anssim/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <sstream>
#include <unordered_map>

#include "anssim/error.hpp"
#include "anssim/format.hpp"
#include "anssim/semantic_metrics.hpp"

namespace anssim {

namespace {

// Neumaier's variant of Kahan summation.
class CompensatedSum {
 public:
  void add(double v) {
    const double t = sum_ + v;
    if (std::abs(sum_) >= std::abs(v)) {
      comp_ += (sum_ - t) + v;
    } else {
      comp_ += (v - t) + sum_;
    }
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

void check_lengths(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) {
    throw Error(ErrorCode::LengthMismatch,
                "series lengths " + std::to_string(x.size()) + " and " + std::to_string(y.size()) + " differ");
  }
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (std::isnan(x[i]) || std::isnan(y[i])) throw Error(ErrorCode::InvalidArgument, "NaN in correlation input");
  }
}

bool is_constant(std::span<const double> v) {
  return std::adjacent_find(v.begin(), v.end(), std::not_equal_to<>()) == v.end();
}

std::int64_t tied_pairs(std::int64_t run) { return run * (run - 1) / 2; }

// Sorts `v` ascending and returns the number of inversions.
std::int64_t merge_sort_inversions(std::vector<double>& v, std::vector<double>& scratch, std::size_t lo,
                                   std::size_t hi) {
  if (hi - lo < 2) return 0;
  const std::size_t mid = lo + (hi - lo) / 2;
  std::int64_t swaps = merge_sort_inversions(v, scratch, lo, mid) + merge_sort_inversions(v, scratch, mid, hi);
  std::size_t i = lo;
  std::size_t j = mid;
  std::size_t k = lo;
  while (i < mid && j < hi) {
    if (v[i] <= v[j]) {
      scratch[k++] = v[i++];
    } else {
      swaps += static_cast<std::int64_t>(mid - i);
      scratch[k++] = v[j++];
    }
  }
  while (i < mid) scratch[k++] = v[i++];
  while (j < hi) scratch[k++] = v[j++];
  std::copy(scratch.begin() + static_cast<std::ptrdiff_t>(lo), scratch.begin() + static_cast<std::ptrdiff_t>(hi),
            v.begin() + static_cast<std::ptrdiff_t>(lo));
  return swaps;
}

CorrelationCell make_cell(std::string metric, CorrelationSplit split, const std::vector<double>& x,
                          const std::vector<double>& y) {
  CorrelationCell cell;
  cell.metric_name = std::move(metric);
  cell.split = split;
  cell.n = x.size();
  cell.pearson_r = pearson_r(x, y);
  cell.kendall_tau_b = kendall_tau_b(x, y);
  return cell;
}

bool in_split(LexicalSplit s, CorrelationSplit split) {
  switch (split) {
    case CorrelationSplit::F1Zero: return s == LexicalSplit::F1Zero;
    case CorrelationSplit::F1Positive: return s == LexicalSplit::F1Positive;
    case CorrelationSplit::All: return true;
  }
  return true;
}

constexpr CorrelationSplit kSplits[] = {CorrelationSplit::F1Zero, CorrelationSplit::F1Positive,
                                        CorrelationSplit::All};

std::string fixed2(const std::optional<double>& v) {
  if (!v) return "-";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", *v);
  return std::string(buf) == "-0.00" ? "0.00" : buf;
}

}  // namespace

std::optional<double> pearson_r(std::span<const double> x, std::span<const double> y) {
  check_lengths(x, y);
  const std::size_t n = x.size();
  if (n < 2 || is_constant(x) || is_constant(y)) return std::nullopt;

  CompensatedSum sx;
  CompensatedSum sy;
  for (std::size_t i = 0; i < n; ++i) {
    sx.add(x[i]);
    sy.add(y[i]);
  }
  const double mx = sx.value() / static_cast<double>(n);
  const double my = sy.value() / static_cast<double>(n);

  CompensatedSum sxx;
  CompensatedSum syy;
  CompensatedSum sxy;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    sxx.add(dx * dx);
    syy.add(dy * dy);
    sxy.add(dx * dy);
  }
  const double denom = std::sqrt(sxx.value()) * std::sqrt(syy.value());
  if (!(denom > 0.0)) return std::nullopt;
  return std::clamp(sxy.value() / denom, -1.0, 1.0);
}

std::optional<double> kendall_tau_b(std::span<const double> x, std::span<const double> y) {
  check_lengths(x, y);
  const std::size_t n = x.size();
  if (n < 2) return std::nullopt;

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return x[a] != x[b] ? x[a] < x[b] : y[a] < y[b];
  });

  std::int64_t ties_x = 0;
  std::int64_t ties_xy = 0;
  std::int64_t run_x = 1;
  std::int64_t run_xy = 1;
  for (std::size_t i = 1; i < n; ++i) {
    const std::size_t a = order[i - 1];
    const std::size_t b = order[i];
    if (x[a] == x[b]) {
      ++run_x;
      if (y[a] == y[b]) {
        ++run_xy;
      } else {
        ties_xy += tied_pairs(run_xy);
        run_xy = 1;
      }
    } else {
      ties_x += tied_pairs(run_x);
      ties_xy += tied_pairs(run_xy);
      run_x = 1;
      run_xy = 1;
    }
  }
  ties_x += tied_pairs(run_x);
  ties_xy += tied_pairs(run_xy);

  std::vector<double> ys(n);
  for (std::size_t i = 0; i < n; ++i) ys[i] = y[order[i]];
  std::vector<double> scratch(n);
  const std::int64_t discordant = merge_sort_inversions(ys, scratch, 0, n);

  std::int64_t ties_y = 0;
  std::int64_t run_y = 1;
  for (std::size_t i = 1; i < n; ++i) {
    if (ys[i] == ys[i - 1]) {
      ++run_y;
    } else {
      ties_y += tied_pairs(run_y);
      run_y = 1;
    }
  }
  ties_y += tied_pairs(run_y);

  const std::int64_t total = tied_pairs(static_cast<std::int64_t>(n));
  const std::int64_t untied_x = total - ties_x;
  const std::int64_t untied_y = total - ties_y;
  if (untied_x == 0 || untied_y == 0) return std::nullopt;
  const std::int64_t concordant = total - ties_x - ties_y + ties_xy - discordant;
  const double tau = static_cast<double>(concordant - discordant) /
                     std::sqrt(static_cast<double>(untied_x) * static_cast<double>(untied_y));
  return std::clamp(tau, -1.0, 1.0);
}

std::string_view to_string(CorrelationSplit split) noexcept {
  switch (split) {
    case CorrelationSplit::F1Zero: return "F1_ZERO";
    case CorrelationSplit::F1Positive: return "F1_POSITIVE";
    case CorrelationSplit::All: return "ALL";
  }
  return "ALL";
}

const CorrelationCell* CorrelationReport::find(std::string_view metric, CorrelationSplit split) const {
  for (const auto& c : cells) {
    if (c.metric_name == metric && c.split == split) return &c;
  }
  return nullptr;
}

std::string CorrelationReport::to_text() const {
  std::size_t width = std::string_view("Metric").size();
  for (const auto& m : metrics) width = std::max(width, m.size());

  std::ostringstream out;
  auto pad = [](std::string s, std::size_t w) {
    if (s.size() < w) s.insert(0, w - s.size(), ' ');
    return s;
  };
  out << std::string("Metric") + std::string(width - 6, ' ');
  for (const char* head : {"F1=0", "F1>0", "All"}) out << " | " << pad(std::string(head) + " r", 8) << ' ' << pad("tau", 6) << ' ' << pad("n", 6);
  out << '\n' << std::string(width, '-');
  for (int i = 0; i < 3; ++i) out << "-+-" << std::string(22, '-');
  out << '\n';
  for (const auto& m : metrics) {
    out << m << std::string(width - m.size(), ' ');
    for (const auto split : kSplits) {
      const CorrelationCell* c = find(m, split);
      out << " | " << pad(c ? fixed2(c->pearson_r) : "-", 8) << ' ' << pad(c ? fixed2(c->kendall_tau_b) : "-", 6)
          << ' ' << pad(c ? std::to_string(c->n) : "0", 6);
    }
    out << '\n';
  }
  return out.str();
}

std::string CorrelationReport::to_json() const {
  std::string out = "{\"cells\":[";
  for (std::size_t i = 0; i < cells.size(); ++i) {
    const auto& c = cells[i];
    if (i > 0) out += ',';
    out += "{\"kendall_tau_b\":" + format_json_number(c.kendall_tau_b) + ",\"metric\":" + json_quote(c.metric_name) +
           ",\"n\":" + std::to_string(c.n) + ",\"pearson_r\":" + format_json_number(c.pearson_r) +
           ",\"split\":" + json_quote(to_string(c.split)) + "}";
  }
  out += "],\"metrics\":[";
  for (std::size_t i = 0; i < metrics.size(); ++i) {
    if (i > 0) out += ',';
    out += json_quote(metrics[i]);
  }
  out += "]}";
  return out;
}

std::vector<CorrelationRow> build_correlation_rows(std::span<const AnswerPair> pairs,
                                                   std::span<const MetricScore> scores,
                                                   std::vector<std::string>& metrics) {
  std::unordered_map<std::string, std::size_t> index;
  std::vector<CorrelationRow> rows;
  rows.reserve(pairs.size());
  for (const auto& p : pairs) {
    if (!p.majority_label) throw Error(ErrorCode::MissingLabels, "pair '" + p.id + "' has no majority label");
    CorrelationRow row;
    row.pair_id = p.id;
    row.split = p.lexical_split;
    row.label = p.majority_label->value();
    if (p.annotator_labels.size() >= 2) {
      row.annotators = std::make_pair(static_cast<double>(p.annotator_labels[0].label.value()),
                                      static_cast<double>(p.annotator_labels[1].label.value()));
    }
    index.emplace(p.id, rows.size());
    rows.push_back(std::move(row));
  }

  const bool collect_metrics = metrics.empty();
  for (const auto& s : scores) {
    const auto it = index.find(s.pair_id);
    if (it == index.end()) throw Error(ErrorCode::UnknownPairId, "score for unknown pair '" + s.pair_id + "'");
    if (!s.value) {
      throw Error(ErrorCode::MissingScores, "metric '" + s.metric_name + "' is undefined for pair '" + s.pair_id + "'");
    }
    rows[it->second].scores[s.metric_name] = *s.value;
    if (collect_metrics && std::find(metrics.begin(), metrics.end(), s.metric_name) == metrics.end()) {
      metrics.push_back(s.metric_name);
    }
  }
  for (const auto& row : rows) {
    for (const auto& m : metrics) {
      if (!row.scores.contains(m)) {
        throw Error(ErrorCode::MissingScores, "pair '" + row.pair_id + "' has no score for metric '" + m + "'");
      }
    }
  }
  return rows;
}

CorrelationReport correlate(std::span<const CorrelationRow> rows, std::span<const std::string> metrics) {
  CorrelationReport report;

  const bool has_human = std::any_of(rows.begin(), rows.end(), [](const auto& r) { return r.annotators.has_value(); });
  if (has_human) {
    report.metrics.emplace_back(kHumanMetric);
    for (const auto split : kSplits) {
      std::vector<double> first;
      std::vector<double> second;
      for (const auto& r : rows) {
        if (r.annotators && in_split(r.split, split)) {
          first.push_back(r.annotators->first);
          second.push_back(r.annotators->second);
        }
      }
      report.cells.push_back(make_cell(std::string(kHumanMetric), split, first, second));
    }
  }

  for (const auto& metric : metrics) {
    report.metrics.push_back(metric);
    for (const auto split : kSplits) {
      std::vector<double> values;
      std::vector<double> labels;
      for (const auto& r : rows) {
        if (!in_split(r.split, split)) continue;
        const auto it = r.scores.find(metric);
        if (it == r.scores.end()) {
          throw Error(ErrorCode::MissingScores, "pair '" + r.pair_id + "' has no score for '" + metric + "'");
        }
        values.push_back(it->second);
        labels.push_back(r.label);
      }
      report.cells.push_back(make_cell(metric, split, values, labels));
    }
  }
  return report;
}

std::vector<LayerPoint> layer_sweep(std::span<const AnswerPair> pairs, ModelBackend& backend,
                                    const std::string& model, std::span<const int> layers, std::size_t batch_size) {
  std::vector<double> labels;
  labels.reserve(pairs.size());
  for (const auto& p : pairs) {
    if (!p.majority_label) throw Error(ErrorCode::MissingLabels, "pair '" + p.id + "' has no majority label");
    labels.push_back(p.majority_label->value());
  }

  std::vector<std::vector<double>> per_layer(layers.size());
  batch_size = std::max<std::size_t>(batch_size, 1);
  for (std::size_t start = 0; start < pairs.size(); start += batch_size) {
    const std::size_t stop = std::min(pairs.size(), start + batch_size);
    std::vector<TextPair> batch;
    for (std::size_t i = start; i < stop; ++i) batch.emplace_back(pairs[i].first.text, pairs[i].second.text);
    const auto scores = bertscore_batch(batch, backend, model, layers);
    for (const auto& pair_scores : scores) {
      for (std::size_t k = 0; k < layers.size(); ++k) per_layer[k].push_back(pair_scores[k].f1);
    }
  }

  std::vector<LayerPoint> out;
  for (std::size_t k = 0; k < layers.size(); ++k) {
    out.push_back(LayerPoint{layers[k], pairs.empty() ? std::nullopt : pearson_r(per_layer[k], labels), pairs.size()});
  }
  return out;
}

std::string sweep_to_csv(std::span<const LayerPoint> points) {
  std::string out = "layer,pearson_r,n\n";
  for (const auto& p : points) {
    out += std::to_string(p.layer) + "," + (p.pearson_r ? format_fixed6(*p.pearson_r) : std::string{}) + "," +
           std::to_string(p.n) + "\n";
  }
  return out;
}

std::string sweep_gnuplot_script(const std::string& csv_path, const std::string& png_path, const std::string& title) {
  std::ostringstream out;
  out << "set terminal pngcairo size 800,500\n"
      << "set output '" << png_path << "'\n"
      << "set datafile separator ','\n"
      << "set key off\n"
      << "set title '" << title << "'\n"
      << "set xlabel 'layer'\n"
      << "set ylabel 'Pearson r'\n"
      << "set grid\n"
      << "plot '" << csv_path << "' every ::1 using 1:2 with linespoints pt 7\n";
  return out.str();
}

}  // namespace anssim
