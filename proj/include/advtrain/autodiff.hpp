#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <utility>
#include <vector>

#include "advtrain/tensor.hpp"

namespace advtrain {

// Handle into a Tape. Cheap to copy, only meaningful with its owning tape.
struct Var {
  std::uint32_t id = UINT32_MAX;
  bool valid() const { return id != UINT32_MAX; }
};

// Gradients produced by one backward pass, indexed by Var.
class Gradients {
 public:
  explicit Gradients(std::vector<Tensor> by_node)
      : by_node_(std::move(by_node)) {}

  const Tensor& wrt(Var v) const {
    if (v.id >= by_node_.size() || by_node_[v.id].empty()) {
      throw ContractError("no gradient recorded for this variable");
    }
    return by_node_[v.id];
  }

  bool has(Var v) const {
    return v.id < by_node_.size() && !by_node_[v.id].empty();
  }

 private:
  std::vector<Tensor> by_node_;
};

struct ImageGeom {
  std::size_t channels = 1;
  std::size_t height = 0;
  std::size_t width = 0;
  std::size_t pixels() const { return channels * height * width; }
};

// Records tensor-level primitive ops during a forward pass and replays their
// adjoints in exact reverse order. One tape serves exactly one backward pass.
class Tape {
 public:
  Var leaf(Tensor value, bool requires_grad = false) {
    return push(std::move(value), requires_grad, nullptr);
  }

  const Tensor& value(Var v) const { return nodes_[v.id].value; }
  bool needs_grad(Var v) const { return nodes_[v.id].needs_grad; }
  std::size_t node_count() const { return nodes_.size(); }

  Var add(Var a, Var b) {
    detail::require_same_shape(value(a), value(b), "add");
    Tensor out = advtrain::add(value(a), value(b));
    return push(std::move(out), needs_grad(a) || needs_grad(b),
                [a, b](Tape& t, const Tensor& up) {
                  t.accumulate(a, up);
                  t.accumulate(b, up);
                });
  }

  Var sub(Var a, Var b) {
    detail::require_same_shape(value(a), value(b), "sub");
    Tensor out = advtrain::sub(value(a), value(b));
    return push(std::move(out), needs_grad(a) || needs_grad(b),
                [a, b](Tape& t, const Tensor& up) {
                  t.accumulate(a, up);
                  t.accumulate(b, advtrain::scale(up, -1.0));
                });
  }

  Var mul(Var a, Var b) {
    detail::require_same_shape(value(a), value(b), "mul");
    Tensor out = advtrain::mul(value(a), value(b));
    return push(std::move(out), needs_grad(a) || needs_grad(b),
                [a, b](Tape& t, const Tensor& up) {
                  if (t.needs_grad(a)) t.accumulate(a, advtrain::mul(up, t.value(b)));
                  if (t.needs_grad(b)) t.accumulate(b, advtrain::mul(up, t.value(a)));
                });
  }

  Var scale(Var a, double s) {
    Tensor out = advtrain::scale(value(a), s);
    return push(std::move(out), needs_grad(a),
                [a, s](Tape& t, const Tensor& up) {
                  t.accumulate(a, advtrain::scale(up, s));
                });
  }

  Var matmul(Var a, Var b) {
    Tensor out = advtrain::matmul(value(a), value(b));
    return push(std::move(out), needs_grad(a) || needs_grad(b),
                [a, b](Tape& t, const Tensor& up) {
                  if (t.needs_grad(a))
                    t.accumulate(a, advtrain::matmul(up, transpose(t.value(b))));
                  if (t.needs_grad(b))
                    t.accumulate(b, advtrain::matmul(transpose(t.value(a)), up));
                });
  }

  // [m x n] + [n], broadcast over rows. Used for dense-layer biases.
  Var add_row_broadcast(Var m, Var r) {
    const Tensor& mv = value(m);
    const Tensor& rv = value(r);
    if (mv.rank() != 2 || rv.size() != mv.dim(1)) {
      throw DimensionError("add_row_broadcast: " + shape_str(mv.shape()) +
                           " + " + shape_str(rv.shape()));
    }
    Tensor out = mv;
    const std::size_t rows = mv.dim(0), cols = mv.dim(1);
    for (std::size_t i = 0; i < rows; ++i)
      for (std::size_t j = 0; j < cols; ++j) out[i * cols + j] += rv[j];
    return push(std::move(out), needs_grad(m) || needs_grad(r),
                [m, r, rows, cols](Tape& t, const Tensor& up) {
                  t.accumulate(m, up);
                  if (t.needs_grad(r)) {
                    Tensor g(t.value(r).shape());
                    for (std::size_t i = 0; i < rows; ++i)
                      for (std::size_t j = 0; j < cols; ++j)
                        g[j] += up[i * cols + j];
                    t.accumulate(r, std::move(g));
                  }
                });
  }

  Var relu(Var a) {
    Tensor out = value(a);
    for (std::size_t i = 0; i < out.size(); ++i)
      if (out[i] < 0.0) out[i] = 0.0;
    return push(std::move(out), needs_grad(a),
                [a](Tape& t, const Tensor& up) {
                  const Tensor& x = t.value(a);
                  Tensor g = up;
                  for (std::size_t i = 0; i < g.size(); ++i)
                    if (x[i] <= 0.0) g[i] = 0.0;
                  t.accumulate(a, std::move(g));
                });
  }

  Var reshape(Var a, Shape shape) {
    Tensor out = value(a).reshaped(shape);
    Shape back = value(a).shape();
    return push(std::move(out), needs_grad(a),
                [a, back](Tape& t, const Tensor& up) {
                  t.accumulate(a, up.reshaped(back));
                });
  }

  Var sum(Var a) {
    Tensor out = Tensor::scalar(advtrain::sum(value(a)));
    return push(std::move(out), needs_grad(a),
                [a](Tape& t, const Tensor& up) {
                  t.accumulate(a, Tensor::full(t.value(a).shape(), up[0]));
                });
  }

  Var mean(Var a) {
    const double inv = 1.0 / static_cast<double>(value(a).size());
    Tensor out = Tensor::scalar(advtrain::sum(value(a)) * inv);
    return push(std::move(out), needs_grad(a),
                [a, inv](Tape& t, const Tensor& up) {
                  t.accumulate(a, Tensor::full(t.value(a).shape(), up[0] * inv));
                });
  }

  // Mean softmax cross-entropy over the batch, stabilized by log-sum-exp.
  // logits: [b x c], labels in [0, c).
  Var softmax_cross_entropy(Var logits, std::span<const int> labels) {
    const Tensor& z = value(logits);
    if (z.rank() != 2 || z.dim(0) != labels.size()) {
      throw DimensionError("softmax_cross_entropy: logits " +
                           shape_str(z.shape()) + " vs " +
                           std::to_string(labels.size()) + " labels");
    }
    const std::size_t b = z.dim(0), c = z.dim(1);
    Tensor probs({b, c});
    double total = 0.0;
    for (std::size_t i = 0; i < b; ++i) {
      const int y = labels[i];
      if (y < 0 || static_cast<std::size_t>(y) >= c) {
        throw ContractError("label " + std::to_string(y) + " out of range [0, " +
                            std::to_string(c) + ") at row " + std::to_string(i));
      }
      double m = z(i, 0);
      for (std::size_t j = 1; j < c; ++j) m = std::max(m, z(i, j));
      double s = 0.0;
      for (std::size_t j = 0; j < c; ++j) s += std::exp(z(i, j) - m);
      const double lse = m + std::log(s);
      for (std::size_t j = 0; j < c; ++j) probs(i, j) = std::exp(z(i, j) - lse);
      total += lse - z(i, static_cast<std::size_t>(y));
    }
    Tensor out = Tensor::scalar(total / static_cast<double>(b));
    std::vector<int> ys(labels.begin(), labels.end());
    return push(std::move(out), needs_grad(logits),
                [logits, probs = std::move(probs), ys = std::move(ys), b,
                 c](Tape& t, const Tensor& up) {
                  Tensor g = probs;
                  const double w = up[0] / static_cast<double>(b);
                  for (std::size_t i = 0; i < b; ++i) {
                    g(i, static_cast<std::size_t>(ys[i])) -= 1.0;
                    for (std::size_t j = 0; j < c; ++j) g(i, j) *= w;
                  }
                  t.accumulate(logits, std::move(g));
                });
  }

  // 3x3 convolution, stride 1, zero padding 1 (spatial size preserved).
  // x: [b, inC*H*W] with geometry geom; w: [outC, inC, 3, 3]; bias: [outC].
  // Output: [b, outC*H*W].
  Var conv2d_3x3(Var x, Var w, Var bias, const ImageGeom& geom) {
    const Tensor& xv = value(x);
    const Tensor& wv = value(w);
    const Tensor& bv = value(bias);
    if (xv.rank() != 2 || xv.dim(1) != geom.pixels()) {
      throw DimensionError("conv2d: input " + shape_str(xv.shape()) +
                           " does not match geometry " +
                           shape_str({geom.channels, geom.height, geom.width}));
    }
    if (wv.rank() != 4 || wv.dim(1) != geom.channels || wv.dim(2) != 3 ||
        wv.dim(3) != 3) {
      throw DimensionError("conv2d: weight " + shape_str(wv.shape()) +
                           " incompatible with " + std::to_string(geom.channels) +
                           " input channels");
    }
    const std::size_t outC = wv.dim(0);
    if (bv.size() != outC)
      throw DimensionError("conv2d: bias " + shape_str(bv.shape()) +
                           " vs outC " + std::to_string(outC));

    Tensor out = conv_forward(xv, wv, bv, geom);
    return push(std::move(out), needs_grad(x) || needs_grad(w) || needs_grad(bias),
                [x, w, bias, geom, outC](Tape& t, const Tensor& up) {
                  conv_backward(t, x, w, bias, geom, outC, up);
                });
  }

  // Runs the reverse pass from a scalar root, consuming the tape. `seed` is
  // the adjoint of the root (defaults to 1).
  Gradients backward(Var root, double seed = 1.0) {
    if (consumed_) {
      throw UsageError("backward called twice on the same tape");
    }
    if (value(root).size() != 1) {
      throw ContractError("backward root must be scalar, got shape " +
                          shape_str(value(root).shape()));
    }
    consumed_ = true;
    grads_.assign(nodes_.size(), Tensor{});
    grads_[root.id] = Tensor(value(root).shape(), {seed});
    for (std::size_t i = root.id + 1; i-- > 0;) {
      if (grads_[i].empty() || !nodes_[i].pull) continue;
      nodes_[i].pull(*this, grads_[i]);
    }
    return Gradients(std::move(grads_));
  }

  bool consumed() const { return consumed_; }

  void accumulate(Var v, Tensor contribution) {
    if (!nodes_[v.id].needs_grad) return;
    Tensor& slot = grads_[v.id];
    if (slot.empty()) {
      slot = std::move(contribution);
    } else {
      for (std::size_t i = 0; i < slot.size(); ++i) slot[i] += contribution[i];
    }
  }

 private:
  struct Node {
    Tensor value;
    bool needs_grad = false;
    std::function<void(Tape&, const Tensor&)> pull;  // null for leaves
  };

  Var push(Tensor value, bool needs,
           std::function<void(Tape&, const Tensor&)> pull) {
    if (consumed_) throw UsageError("tape already consumed by backward");
    nodes_.push_back(Node{std::move(value), needs, std::move(pull)});
    return Var{static_cast<std::uint32_t>(nodes_.size() - 1)};
  }

  static Tensor conv_forward(const Tensor& xv, const Tensor& wv,
                             const Tensor& bv, const ImageGeom& geom) {
    const std::size_t b = xv.dim(0), inC = geom.channels, H = geom.height,
                      W = geom.width, outC = wv.dim(0);
    Tensor out({b, outC * H * W});
    for (std::size_t i = 0; i < b; ++i) {
      const double* xi = xv.raw() + i * inC * H * W;
      double* oi = out.raw() + i * outC * H * W;
      for (std::size_t oc = 0; oc < outC; ++oc) {
        const double* wk = wv.raw() + oc * inC * 9;
        double* oplane = oi + oc * H * W;
        for (std::size_t y = 0; y < H; ++y) {
          for (std::size_t xcol = 0; xcol < W; ++xcol) {
            double acc = bv[oc];
            for (std::size_t ic = 0; ic < inC; ++ic) {
              const double* xplane = xi + ic * H * W;
              const double* wrow = wk + ic * 9;
              for (int ky = -1; ky <= 1; ++ky) {
                const std::ptrdiff_t yy = static_cast<std::ptrdiff_t>(y) + ky;
                if (yy < 0 || yy >= static_cast<std::ptrdiff_t>(H)) continue;
                for (int kx = -1; kx <= 1; ++kx) {
                  const std::ptrdiff_t xx =
                      static_cast<std::ptrdiff_t>(xcol) + kx;
                  if (xx < 0 || xx >= static_cast<std::ptrdiff_t>(W)) continue;
                  acc += xplane[yy * static_cast<std::ptrdiff_t>(W) + xx] *
                         wrow[(ky + 1) * 3 + (kx + 1)];
                }
              }
            }
            oplane[y * W + xcol] = acc;
          }
        }
      }
    }
    return out;
  }

  static void conv_backward(Tape& t, Var x, Var w, Var bias,
                            const ImageGeom& geom, std::size_t outC,
                            const Tensor& up) {
    const Tensor& xv = t.value(x);
    const Tensor& wv = t.value(w);
    const std::size_t b = xv.dim(0), inC = geom.channels, H = geom.height,
                      W = geom.width;
    const bool nx = t.needs_grad(x), nw = t.needs_grad(w), nb = t.needs_grad(bias);
    Tensor gx = nx ? Tensor(xv.shape()) : Tensor{};
    Tensor gw = nw ? Tensor(wv.shape()) : Tensor{};
    Tensor gb = nb ? Tensor(t.value(bias).shape()) : Tensor{};
    for (std::size_t i = 0; i < b; ++i) {
      const double* xi = xv.raw() + i * inC * H * W;
      const double* ui = up.raw() + i * outC * H * W;
      for (std::size_t oc = 0; oc < outC; ++oc) {
        const double* uplane = ui + oc * H * W;
        for (std::size_t y = 0; y < H; ++y) {
          for (std::size_t xcol = 0; xcol < W; ++xcol) {
            const double g = uplane[y * W + xcol];
            if (g == 0.0) continue;
            if (nb) gb[oc] += g;
            for (std::size_t ic = 0; ic < inC; ++ic) {
              const double* xplane = xi + ic * H * W;
              const double* wrow = wv.raw() + (oc * inC + ic) * 9;
              for (int ky = -1; ky <= 1; ++ky) {
                const std::ptrdiff_t yy = static_cast<std::ptrdiff_t>(y) + ky;
                if (yy < 0 || yy >= static_cast<std::ptrdiff_t>(H)) continue;
                for (int kx = -1; kx <= 1; ++kx) {
                  const std::ptrdiff_t xx =
                      static_cast<std::ptrdiff_t>(xcol) + kx;
                  if (xx < 0 || xx >= static_cast<std::ptrdiff_t>(W)) continue;
                  const std::size_t xoff =
                      static_cast<std::size_t>(yy) * W + static_cast<std::size_t>(xx);
                  const std::size_t woff = (ky + 1) * 3 + (kx + 1);
                  if (nx)
                    gx[i * inC * H * W + ic * H * W + xoff] += g * wrow[woff];
                  if (nw)
                    gw[(oc * inC + ic) * 9 + woff] += g * xplane[xoff];
                }
              }
            }
          }
        }
      }
    }
    if (nx) t.accumulate(x, std::move(gx));
    if (nw) t.accumulate(w, std::move(gw));
    if (nb) t.accumulate(bias, std::move(gb));
  }

  std::vector<Node> nodes_;
  std::vector<Tensor> grads_;
  bool consumed_ = false;
};

}  // namespace advtrain
