// Copyright 2026 The PGKET Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef PGKET_AUTODIFF_HPP_
#define PGKET_AUTODIFF_HPP_

#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <optional>
#include <utility>
#include <vector>

#include "pgket/errors.hpp"
#include "pgket/kernel.hpp"
#include "pgket/linalg.hpp"
#include "pgket/nn.hpp"
#include "pgket/tensor.hpp"

// Minimal reverse-mode differentiation: an append-only tape of nodes, each
// holding its value, its parents, and a vector-Jacobian closure. Nodes are
// created in forward order, so a reverse index sweep is a valid topological
// order and every node's adjoint is complete before its own closure runs.
// Forward values are computed by the same functions the inference path uses,
// so tape and pure forwards agree bit for bit.

namespace pgket::ad {

class Tape {
 public:
  using NodeId = std::size_t;
  static constexpr NodeId kNoNode = std::numeric_limits<NodeId>::max();

  NodeId leaf(RealTensor value) {
    return push(std::move(value), {}, nullptr);
  }

  const RealTensor& value(NodeId id) const { return nodes_.at(id).value; }

  std::size_t size() const { return nodes_.size(); }

  /// Reverse sweep from a scalar loss. Adjoints accumulate in creation
  /// order, so the reduction is deterministic.
  void backward(NodeId loss) {
    if (loss >= nodes_.size()) {
      throw ValidationError("Tape::backward: unknown node");
    }
    if (nodes_[loss].value.size() != 1) {
      throw ValidationError("Tape::backward: loss must be scalar");
    }
    adjoints_.assign(nodes_.size(), RealTensor());
    touched_.assign(nodes_.size(), false);
    accumulate(loss, RealTensor::scalar(1.0));
    for (NodeId id = loss + 1; id-- > 0;) {
      if (!touched_[id] || !nodes_[id].vjp) continue;
      nodes_[id].vjp(*this, adjoints_[id]);
    }
  }

  /// Gradient of the last backward()'s loss w.r.t. this node (zeros if the
  /// node did not influence the loss).
  RealTensor grad(NodeId id) const {
    if (id >= nodes_.size()) throw ValidationError("Tape::grad: unknown node");
    if (id < touched_.size() && touched_[id]) return adjoints_[id];
    return RealTensor(nodes_[id].value.shape());
  }

  void accumulate(NodeId id, const RealTensor& contribution) {
    if (!nodes_[id].value.same_shape(contribution)) {
      throw InternalError("Tape: adjoint shape mismatch");
    }
    if (!touched_[id]) {
      adjoints_[id] = contribution;
      touched_[id] = true;
    } else {
      for (std::size_t i = 0; i < contribution.size(); ++i) {
        adjoints_[id][i] += contribution[i];
      }
    }
  }

  // ---- primitives -------------------------------------------------------

  NodeId add(NodeId a, NodeId b) {
    const RealTensor& x = value(a);
    const RealTensor& y = value(b);
    if (!x.same_shape(y)) throw ShapeError("Tape::add: shapes disagree");
    RealTensor out(x.shape());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = x[i] + y[i];
    return push(std::move(out), {a, b},
                [a, b](Tape& t, const RealTensor& adj) {
                  t.accumulate(a, adj);
                  t.accumulate(b, adj);
                });
  }

  NodeId scale(NodeId a, double c) {
    const RealTensor& x = value(a);
    RealTensor out(x.shape());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = c * x[i];
    return push(std::move(out), {a}, [a, c](Tape& t, const RealTensor& adj) {
      RealTensor g(adj.shape());
      for (std::size_t i = 0; i < g.size(); ++i) g[i] = c * adj[i];
      t.accumulate(a, g);
    });
  }

  NodeId matmul(NodeId a, NodeId b) {
    RealTensor out = pgket::matmul(value(a), value(b));
    return push(std::move(out), {a, b},
                [a, b](Tape& t, const RealTensor& adj) {
                  t.accumulate(a, pgket::matmul(adj, transpose(t.value(b))));
                  t.accumulate(b, pgket::matmul(transpose(t.value(a)), adj));
                });
  }

  /// x (n x k) plus a length-k bias broadcast over rows.
  NodeId add_row_broadcast(NodeId x, NodeId bias) {
    const RealTensor& xv = value(x);
    const RealTensor& bv = value(bias);
    if (xv.rank() != 2 || bv.size() != xv.cols()) {
      throw ShapeError("Tape::add_row_broadcast: extents disagree");
    }
    RealTensor out(xv.shape());
    for (std::size_t i = 0; i < xv.rows(); ++i) {
      for (std::size_t j = 0; j < xv.cols(); ++j) {
        out(i, j) = xv(i, j) + bv[j];
      }
    }
    return push(std::move(out), {x, bias},
                [x, bias](Tape& t, const RealTensor& adj) {
                  t.accumulate(x, adj);
                  RealTensor g(t.value(bias).shape());
                  for (std::size_t i = 0; i < adj.rows(); ++i) {
                    for (std::size_t j = 0; j < adj.cols(); ++j) {
                      g[j] += adj(i, j);
                    }
                  }
                  t.accumulate(bias, g);
                });
  }

  NodeId relu(NodeId a) {
    const RealTensor& x = value(a);
    RealTensor out(x.shape());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = std::max(0.0, x[i]);
    return push(std::move(out), {a},
                [a, self = nodes_.size()](Tape& t, const RealTensor& adj) {
                  const RealTensor& y = t.value(self);
                  RealTensor g(adj.shape());
                  for (std::size_t i = 0; i < g.size(); ++i) {
                    g[i] = y[i] > 0.0 ? adj[i] : 0.0;
                  }
                  t.accumulate(a, g);
                });
  }

  NodeId layer_norm(NodeId x, NodeId gain, NodeId bias,
                    double eps = nn::kLayerNormEpsilon) {
    RealTensor out = nn::layer_norm(value(x), value(gain), value(bias), eps);
    return push(
        std::move(out), {x, gain, bias},
        [x, gain, bias, eps](Tape& t, const RealTensor& adj) {
          const RealTensor& xv = t.value(x);
          const RealTensor& gv = t.value(gain);
          const std::size_t n = xv.rows(), d = xv.cols();
          RealTensor dx(xv.shape());
          RealTensor dg(gv.shape());
          RealTensor db(t.value(bias).shape());
          std::vector<double> xhat(d), h(d);
          for (std::size_t i = 0; i < n; ++i) {
            double mean = 0.0;
            for (std::size_t j = 0; j < d; ++j) mean += xv(i, j);
            mean /= static_cast<double>(d);
            double var = 0.0;
            for (std::size_t j = 0; j < d; ++j) {
              const double c = xv(i, j) - mean;
              var += c * c;
            }
            var /= static_cast<double>(d);
            const double inv_sigma = 1.0 / std::sqrt(var + eps);
            double mean_h = 0.0, mean_hx = 0.0;
            for (std::size_t j = 0; j < d; ++j) {
              xhat[j] = (xv(i, j) - mean) * inv_sigma;
              h[j] = adj(i, j) * gv[j];
              mean_h += h[j];
              mean_hx += h[j] * xhat[j];
              dg[j] += adj(i, j) * xhat[j];
              db[j] += adj(i, j);
            }
            mean_h /= static_cast<double>(d);
            mean_hx /= static_cast<double>(d);
            for (std::size_t j = 0; j < d; ++j) {
              dx(i, j) = (h[j] - mean_h - xhat[j] * mean_hx) * inv_sigma;
            }
          }
          t.accumulate(x, dx);
          t.accumulate(gain, dg);
          t.accumulate(bias, db);
        });
  }

  /// (n x d) -> (1 x d) token mean.
  NodeId mean_rows(NodeId a) {
    const RealTensor& x = value(a);
    if (x.rank() != 2) throw ShapeError("Tape::mean_rows: input must be 2-D");
    const std::size_t n = x.rows(), d = x.cols();
    RealTensor out({1, d});
    for (std::size_t j = 0; j < d; ++j) {
      double acc = 0.0;
      for (std::size_t i = 0; i < n; ++i) acc += x(i, j);
      out(0, j) = acc / static_cast<double>(n);
    }
    return push(std::move(out), {a}, [a, n, d](Tape& t, const RealTensor& adj) {
      RealTensor g({n, d});
      const double inv = 1.0 / static_cast<double>(n);
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < d; ++j) g(i, j) = adj(0, j) * inv;
      }
      t.accumulate(a, g);
    });
  }

  /// -log softmax(logits)[label], numerically stabilized. Accepts a length-K
  /// vector or a 1 x K row.
  NodeId cross_entropy(NodeId logits, std::size_t label) {
    const RealTensor& lv = value(logits);
    const std::size_t k = lv.size();
    if (lv.rank() > 2 || (lv.rank() == 2 && lv.rows() != 1)) {
      throw ShapeError("Tape::cross_entropy: logits must be one row");
    }
    if (label >= k) {
      throw ValidationError("Tape::cross_entropy: label out of range");
    }
    double mx = lv[0];
    for (std::size_t i = 1; i < k; ++i) mx = std::max(mx, lv[i]);
    double sum = 0.0;
    for (std::size_t i = 0; i < k; ++i) sum += std::exp(lv[i] - mx);
    const double loss = mx + std::log(sum) - lv[label];
    std::vector<double> prob(k);
    for (std::size_t i = 0; i < k; ++i) prob[i] = std::exp(lv[i] - mx) / sum;
    return push(RealTensor::scalar(loss), {logits},
                [logits, label, prob](Tape& t, const RealTensor& adj) {
                  RealTensor g(t.value(logits).shape());
                  for (std::size_t i = 0; i < g.size(); ++i) {
                    g[i] = adj[0] * (prob[i] - (i == label ? 1.0 : 0.0));
                  }
                  t.accumulate(logits, g);
                });
  }

  NodeId half_sum_squares(NodeId a) {
    const RealTensor& x = value(a);
    double acc = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) acc += x[i] * x[i];
    return push(RealTensor::scalar(0.5 * acc), {a},
                [a](Tape& t, const RealTensor& adj) {
                  const RealTensor& x = t.value(a);
                  RealTensor g(x.shape());
                  for (std::size_t i = 0; i < g.size(); ++i) {
                    g[i] = adj[0] * x[i];
                  }
                  t.accumulate(a, g);
                });
  }

  /// Photonic attention scores (normalized if the config says so). The value
  /// can optionally come from the shot estimator, but the vector-Jacobian
  /// rule always differentiates the exact score path.
  NodeId pgksam_scores(NodeId tokens, NodeId theta, NodeId phi,
                       kernel::KernelConfig cfg, std::size_t mesh_depth,
                       NodeId log_weight = kNoNode,
                       SeededRng* shot_rng = nullptr) {
    if (cfg.score_mode == kernel::ScoreMode::kScalarWeighted &&
        log_weight != kNoNode) {
      cfg.scalar_weight = std::exp(value(log_weight)[0]);
    }

    kernel::MeshParams mesh =
        kernel::MeshParams::identity(cfg.num_modes, mesh_depth);
    mesh.set_flat_theta(value(theta).values());
    mesh.set_flat_phi(value(phi).values());

    kernel::KernelConfig exact_cfg = cfg;
    exact_cfg.backend = kernel::ScoreBackend::kExact;
    exact_cfg.normalize_rows = false;
    const RealTensor raw =
        kernel::score_matrix(value(tokens), mesh, exact_cfg).scores;

    const std::size_t n = raw.rows();
    std::vector<double> row_sums(n, 0.0);
    RealTensor normalized = raw;
    if (cfg.normalize_rows) {
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) row_sums[i] += raw(i, j);
      }
      kernel::normalize_score_rows(normalized);
    }

    RealTensor out;
    if (shot_rng != nullptr && cfg.backend == kernel::ScoreBackend::kShots) {
      out = kernel::score_matrix(value(tokens), mesh, cfg, shot_rng).scores;
    } else {
      out = normalized;
    }

    std::vector<NodeId> parents{tokens, theta, phi};
    if (log_weight != kNoNode) parents.push_back(log_weight);
    return push(
        std::move(out), std::move(parents),
        [tokens, theta, phi, log_weight, cfg, mesh, normalized, row_sums,
         n](Tape& t, const RealTensor& adj) {
          RealTensor kbar({n, n});
          if (cfg.normalize_rows) {
            for (std::size_t i = 0; i < n; ++i) {
              if (row_sums[i] == 0.0) continue;  // uniform fallback row
              double dot = 0.0;
              for (std::size_t j = 0; j < n; ++j) {
                dot += adj(i, j) * normalized(i, j);
              }
              for (std::size_t j = 0; j < n; ++j) {
                kbar(i, j) = (adj(i, j) - dot) / row_sums[i];
              }
            }
          } else {
            kbar = adj;
          }
          const kernel::ScoreMatrixGrads g =
              kernel::score_matrix_vjp(t.value(tokens), mesh, cfg, kbar);
          t.accumulate(tokens, g.d_tokens);
          t.accumulate(theta, RealTensor::vector(g.d_theta));
          t.accumulate(phi, RealTensor::vector(g.d_phi));
          if (log_weight != kNoNode) {
            // d/d(log w) = w * d/dw
            t.accumulate(log_weight, RealTensor::scalar(g.d_scalar_weight *
                                                        cfg.scalar_weight));
          }
        });
  }

  /// Classical Gaussian-kernel scores with Gamma = M^T M (always
  /// row-normalized, matching the reference definition).
  NodeId gksam_scores(NodeId tokens, NodeId factor) {
    const RealTensor& m = value(factor);
    const RealTensor gamma = pgket::matmul(transpose(m), m);
    const RealTensor raw = nn::gksam_scores_raw(value(tokens), gamma);
    const std::size_t n = raw.rows();
    RealTensor normalized = raw;
    std::vector<double> row_sums(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) row_sums[i] += raw(i, j);
      for (std::size_t j = 0; j < n; ++j) normalized(i, j) /= row_sums[i];
    }
    return push(
        RealTensor(normalized), {tokens, factor},
        [tokens, factor, gamma, raw, normalized, row_sums, n](
            Tape& t, const RealTensor& adj) {
          const RealTensor& x = t.value(tokens);
          const RealTensor& m = t.value(factor);
          const std::size_t d = x.cols();

          RealTensor kbar({n, n});
          for (std::size_t i = 0; i < n; ++i) {
            double dot = 0.0;
            for (std::size_t j = 0; j < n; ++j) {
              dot += adj(i, j) * normalized(i, j);
            }
            for (std::size_t j = 0; j < n; ++j) {
              kbar(i, j) = (adj(i, j) - dot) / row_sums[i];
            }
          }

          RealTensor dx(x.shape());
          RealTensor dm(m.shape());
          std::vector<double> z(d), gz(d), mz(d);
          for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) {
              if (i == j || kbar(i, j) == 0.0) continue;
              for (std::size_t u = 0; u < d; ++u) z[u] = x(i, u) - x(j, u);
              for (std::size_t u = 0; u < d; ++u) {
                double accg = 0.0, accm = 0.0;
                for (std::size_t v = 0; v < d; ++v) {
                  accg += gamma(u, v) * z[v];
                  accm += m(u, v) * z[v];
                }
                gz[u] = accg;
                mz[u] = accm;
              }
              const double coeff = kbar(i, j) * (-raw(i, j));
              for (std::size_t u = 0; u < d; ++u) {
                dx(i, u) += coeff * gz[u];
                dx(j, u) -= coeff * gz[u];
                for (std::size_t v = 0; v < d; ++v) {
                  dm(u, v) += coeff * mz[u] * z[v];
                }
              }
            }
          }
          t.accumulate(tokens, dx);
          t.accumulate(factor, dm);
        });
  }

 private:
  struct Node {
    RealTensor value;
    std::vector<NodeId> parents;
    std::function<void(Tape&, const RealTensor&)> vjp;
  };

  NodeId push(RealTensor value, std::vector<NodeId> parents,
              std::function<void(Tape&, const RealTensor&)> vjp) {
    const NodeId id = nodes_.size();
    for (NodeId p : parents) {
      if (p >= id) {
        throw InternalError("Tape: node graph would contain a cycle");
      }
    }
    nodes_.push_back(Node{std::move(value), std::move(parents), std::move(vjp)});
    return id;
  }

  std::vector<Node> nodes_;
  std::vector<RealTensor> adjoints_;
  std::vector<bool> touched_;
};

}  // namespace pgket::ad

#endif  // PGKET_AUTODIFF_HPP_
