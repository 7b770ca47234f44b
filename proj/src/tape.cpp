#include "c2b/tape.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <utility>

namespace c2b {

namespace {

template <typename S>
using Mat = Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic>;
template <typename S>
using RowMat = Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// im2col for one batch element: row (ci*k + ky)*k + kx, column y*wo + x.
template <typename S>
void fill_patches(const TensorT<S>& in, int n, int k, int stride, int pad, int ho, int wo,
                  Mat<S>& patches) {
  for (int ci = 0; ci < in.c; ++ci) {
    for (int ky = 0; ky < k; ++ky) {
      for (int kx = 0; kx < k; ++kx) {
        const int row = (ci * k + ky) * k + kx;
        for (int y = 0; y < ho; ++y) {
          const int sy = y * stride - pad + ky;
          const bool row_inside = sy >= 0 && sy < in.h;
          for (int x = 0; x < wo; ++x) {
            const int sx = x * stride - pad + kx;
            const bool inside = row_inside && sx >= 0 && sx < in.w;
            patches(row, y * wo + x) = inside ? in.at(n, ci, sy, sx) : S(0);
          }
        }
      }
    }
  }
}

template <typename S>
S sign_of(S d) {
  return d > S(0) ? S(1) : (d < S(0) ? S(-1) : S(0));
}

}  // namespace

template <typename S>
typename TapeT<S>::Id TapeT<S>::check(Id id) const {
  if (id < 0 || id >= size()) throw ValueError("tape id out of range");
  return id;
}

template <typename S>
typename TapeT<S>::Id TapeT<S>::push(TensorT<S> value,
                                     std::function<void(std::vector<TensorT<S>>&)> back) {
  Node node;
  node.grad = TensorT<S>::zeros_like(value);
  node.value = std::move(value);
  node.back = std::move(back);
  nodes_.push_back(std::move(node));
  return static_cast<Id>(nodes_.size() - 1);
}

template <typename S>
typename TapeT<S>::Id TapeT<S>::leaf(TensorT<S> value) {
  if (!value.all_finite()) throw ValueError("tape leaf values must be finite");
  return push(std::move(value), nullptr);
}

template <typename S>
typename TapeT<S>::Id TapeT<S>::conv2d(Id input, Id weight, Id bias, int stride, int pad) {
  const TensorT<S>& in = value(input);
  const TensorT<S>& wt = value(weight);
  const TensorT<S>& bs = value(bias);
  if (stride < 1 || pad < 0) throw ValueError("conv2d: stride >= 1 and pad >= 0 required");
  if (wt.h != wt.w) throw DimensionError("conv2d: kernel must be square, got " + wt.shape_str());
  const int k = wt.h;
  const int cout = wt.b;
  const int cin = in.c;
  if (wt.c != cin) {
    throw DimensionError("conv2d: weight " + wt.shape_str() + " does not accept " +
                         std::to_string(cin) + " input channels");
  }
  if (bs.b != 1 || bs.c != cout || bs.h != 1 || bs.w != 1) {
    throw DimensionError("conv2d: bias must be 1x" + std::to_string(cout) + "x1x1, got " +
                         bs.shape_str());
  }
  const int hspan = in.h + 2 * pad - k;
  const int wspan = in.w + 2 * pad - k;
  if (hspan < 0 || wspan < 0 || hspan % stride != 0 || wspan % stride != 0) {
    throw DimensionError("conv2d: kernel " + std::to_string(k) + " stride " +
                         std::to_string(stride) + " pad " + std::to_string(pad) +
                         " does not produce integral output dims on " + in.shape_str());
  }
  const int ho = hspan / stride + 1;
  const int wo = wspan / stride + 1;

  TensorT<S> out(in.b, cout, ho, wo);
  {
    Mat<S> patches(cin * k * k, ho * wo);
    Eigen::Map<const RowMat<S>> wmat(wt.data.data(), cout, cin * k * k);
    for (int n = 0; n < in.b; ++n) {
      fill_patches(in, n, k, stride, pad, ho, wo, patches);
      Eigen::Map<RowMat<S>> omat(out.data.data() + static_cast<size_t>(n) * cout * ho * wo,
                                 cout, static_cast<size_t>(ho) * wo);
      omat.noalias() = wmat * patches;
      for (int co = 0; co < cout; ++co) omat.row(co).array() += bs.data[co];
    }
  }

  const Id out_id = size();
  auto back = [this, input, weight, bias, out_id, stride, pad, k, ho,
               wo](std::vector<TensorT<S>>& g) {
    const TensorT<S>& in2 = value(input);
    const TensorT<S>& wt2 = value(weight);
    const int cout2 = wt2.b;
    const int cin2 = in2.c;
    Eigen::Map<const RowMat<S>> wmat(wt2.data.data(), cout2, cin2 * k * k);
    Eigen::Map<RowMat<S>> dwmat(g[weight].data.data(), cout2, cin2 * k * k);
    TensorT<S>& din = g[input];
    TensorT<S>& dbias = g[bias];
    Mat<S> patches(cin2 * k * k, ho * wo);
    Mat<S> dpatches(cin2 * k * k, ho * wo);
    for (int n = 0; n < in2.b; ++n) {
      Eigen::Map<const RowMat<S>> gout(
          g[out_id].data.data() + static_cast<size_t>(n) * cout2 * ho * wo, cout2,
          static_cast<size_t>(ho) * wo);
      fill_patches(in2, n, k, stride, pad, ho, wo, patches);
      dwmat.noalias() += gout * patches.transpose();
      // Fixed-order accumulation; Eigen's vectorized sum() splits by runtime
      // pointer alignment, which breaks bit-level run-to-run determinism.
      for (int co = 0; co < cout2; ++co) {
        S acc = S(0);
        const S* row = g[out_id].data.data() +
                       (static_cast<size_t>(n) * cout2 + co) * (static_cast<size_t>(ho) * wo);
        for (int i = 0; i < ho * wo; ++i) acc += row[i];
        dbias.data[co] += acc;
      }
      dpatches.noalias() = wmat.transpose() * gout;
      for (int ci = 0; ci < cin2; ++ci) {
        for (int ky = 0; ky < k; ++ky) {
          for (int kx = 0; kx < k; ++kx) {
            const int row = (ci * k + ky) * k + kx;
            for (int y = 0; y < ho; ++y) {
              const int sy = y * stride - pad + ky;
              if (sy < 0 || sy >= in2.h) continue;
              for (int x = 0; x < wo; ++x) {
                const int sx = x * stride - pad + kx;
                if (sx < 0 || sx >= in2.w) continue;
                din.at(n, ci, sy, sx) += dpatches(row, y * wo + x);
              }
            }
          }
        }
      }
    }
  };
  return push(std::move(out), std::move(back));
}

template <typename S>
typename TapeT<S>::Id TapeT<S>::relu(Id x) {
  TensorT<S> out = value(x);
  for (S& v : out.data) v = v > S(0) ? v : S(0);
  const Id out_id = size();
  auto back = [this, x, out_id](std::vector<TensorT<S>>& g) {
    const TensorT<S>& in = value(x);
    for (size_t i = 0; i < in.data.size(); ++i) {
      if (in.data[i] > S(0)) g[x].data[i] += g[out_id].data[i];
    }
  };
  return push(std::move(out), std::move(back));
}

template <typename S>
typename TapeT<S>::Id TapeT<S>::maxpool2(Id x) {
  const TensorT<S>& in = value(x);
  if (in.h % 2 != 0 || in.w % 2 != 0) {
    throw DimensionError("maxpool2: spatial dims must be even, got " + in.shape_str());
  }
  const int ho = in.h / 2;
  const int wo = in.w / 2;
  TensorT<S> out(in.b, in.c, ho, wo);
  std::vector<size_t> argmax(out.numel());
  size_t j = 0;
  for (int n = 0; n < in.b; ++n) {
    for (int ci = 0; ci < in.c; ++ci) {
      for (int y = 0; y < ho; ++y) {
        for (int xo = 0; xo < wo; ++xo) {
          S best = in.at(n, ci, 2 * y, 2 * xo);
          size_t best_index =
              ((static_cast<size_t>(n) * in.c + ci) * in.h + 2 * y) * in.w + 2 * xo;
          for (int dy = 0; dy < 2; ++dy) {
            for (int dx = 0; dx < 2; ++dx) {
              const S v = in.at(n, ci, 2 * y + dy, 2 * xo + dx);
              if (v > best) {
                best = v;
                best_index = ((static_cast<size_t>(n) * in.c + ci) * in.h + 2 * y + dy) * in.w +
                             2 * xo + dx;
              }
            }
          }
          out.data[j] = best;
          argmax[j] = best_index;
          ++j;
        }
      }
    }
  }
  const Id out_id = size();
  auto back = [x, out_id, argmax = std::move(argmax)](std::vector<TensorT<S>>& g) {
    for (size_t i = 0; i < argmax.size(); ++i) g[x].data[argmax[i]] += g[out_id].data[i];
  };
  return push(std::move(out), std::move(back));
}

template <typename S>
typename TapeT<S>::Id TapeT<S>::upsample2(Id x) {
  const TensorT<S>& in = value(x);
  TensorT<S> out(in.b, in.c, in.h * 2, in.w * 2);
  for (int n = 0; n < in.b; ++n) {
    for (int ci = 0; ci < in.c; ++ci) {
      for (int y = 0; y < out.h; ++y) {
        for (int xo = 0; xo < out.w; ++xo) {
          out.at(n, ci, y, xo) = in.at(n, ci, y / 2, xo / 2);
        }
      }
    }
  }
  const Id out_id = size();
  auto back = [this, x, out_id](std::vector<TensorT<S>>& g) {
    const TensorT<S>& gout = g[out_id];
    for (int n = 0; n < gout.b; ++n) {
      for (int ci = 0; ci < gout.c; ++ci) {
        for (int y = 0; y < gout.h; ++y) {
          for (int xo = 0; xo < gout.w; ++xo) {
            g[x].at(n, ci, y / 2, xo / 2) += gout.at(n, ci, y, xo);
          }
        }
      }
    }
  };
  return push(std::move(out), std::move(back));
}

template <typename S>
typename TapeT<S>::Id TapeT<S>::concat_channels(Id a, Id b) {
  const TensorT<S>& ta = value(a);
  const TensorT<S>& tb = value(b);
  if (ta.b != tb.b || ta.h != tb.h || ta.w != tb.w) {
    throw DimensionError("concat_channels: batch/spatial dims differ, " + ta.shape_str() +
                         " vs " + tb.shape_str());
  }
  TensorT<S> out(ta.b, ta.c + tb.c, ta.h, ta.w);
  const size_t plane = static_cast<size_t>(ta.h) * ta.w;
  const size_t a_block = static_cast<size_t>(ta.c) * plane;
  const size_t b_block = static_cast<size_t>(tb.c) * plane;
  for (int n = 0; n < ta.b; ++n) {
    std::copy_n(ta.data.data() + n * a_block, a_block,
                out.data.data() + n * (a_block + b_block));
    std::copy_n(tb.data.data() + n * b_block, b_block,
                out.data.data() + n * (a_block + b_block) + a_block);
  }
  const Id out_id = size();
  auto back = [a, b, out_id, a_block, b_block](std::vector<TensorT<S>>& g) {
    const TensorT<S>& gout = g[out_id];
    for (int n = 0; n < gout.b; ++n) {
      const S* src = gout.data.data() + n * (a_block + b_block);
      S* da = g[a].data.data() + n * a_block;
      S* db = g[b].data.data() + n * b_block;
      for (size_t i = 0; i < a_block; ++i) da[i] += src[i];
      for (size_t i = 0; i < b_block; ++i) db[i] += src[a_block + i];
    }
  };
  return push(std::move(out), std::move(back));
}

template <typename S>
typename TapeT<S>::Id TapeT<S>::cosine_channels(Id a, Id b, S eps) {
  const TensorT<S>& ta = value(a);
  const TensorT<S>& tb = value(b);
  if (!ta.same_shape(tb)) {
    throw DimensionError("cosine_channels: shapes differ, " + ta.shape_str() + " vs " +
                         tb.shape_str());
  }
  if (ta.c < 1) throw DimensionError("cosine_channels: needs at least one channel");
  if (!(eps > S(0))) throw ValueError("cosine_channels: eps must be positive");

  const size_t locations = static_cast<size_t>(ta.b) * ta.h * ta.w;
  TensorT<S> out(ta.b, 1, ta.h, ta.w);
  std::vector<S> denom(locations), norm_a(locations), norm_b(locations);
  std::vector<uint8_t> live_a(locations), live_b(locations);
  const S eps2 = eps * eps;
  size_t loc = 0;
  for (int n = 0; n < ta.b; ++n) {
    for (int y = 0; y < ta.h; ++y) {
      for (int x = 0; x < ta.w; ++x) {
        S sab = S(0), saa = S(0), sbb = S(0);
        for (int ci = 0; ci < ta.c; ++ci) {
          const S va = ta.at(n, ci, y, x);
          const S vb = tb.at(n, ci, y, x);
          sab += va * vb;
          saa += va * va;
          sbb += vb * vb;
        }
        // max(|a|, eps) * max(|b|, eps) evaluated on the squares; when the
        // two squared norms are equal the sqrt returns them exactly, so
        // identical inputs give exactly 1.
        live_a[loc] = saa > eps2;
        live_b[loc] = sbb > eps2;
        const S ma = live_a[loc] ? saa : eps2;
        const S mb = live_b[loc] ? sbb : eps2;
        const S d = std::sqrt(ma * mb);
        norm_a[loc] = ma;
        norm_b[loc] = mb;
        denom[loc] = d;
        out.at(n, 0, y, x) = sab / d;
        ++loc;
      }
    }
  }

  const Id out_id = size();
  auto back = [this, a, b, out_id, denom = std::move(denom), norm_a = std::move(norm_a),
               norm_b = std::move(norm_b), live_a = std::move(live_a),
               live_b = std::move(live_b)](std::vector<TensorT<S>>& g) {
    const TensorT<S>& ta2 = value(a);
    const TensorT<S>& tb2 = value(b);
    const TensorT<S>& cos = value(out_id);
    size_t loc2 = 0;
    for (int n = 0; n < ta2.b; ++n) {
      for (int y = 0; y < ta2.h; ++y) {
        for (int x = 0; x < ta2.w; ++x) {
          const S gout = g[out_id].at(n, 0, y, x);
          if (gout != S(0)) {
            const S c = cos.at(n, 0, y, x);
            const S d = denom[loc2];
            for (int ci = 0; ci < ta2.c; ++ci) {
              const S va = ta2.at(n, ci, y, x);
              const S vb = tb2.at(n, ci, y, x);
              S da = vb / d;
              if (live_a[loc2]) da -= c * va / norm_a[loc2];
              S db = va / d;
              if (live_b[loc2]) db -= c * vb / norm_b[loc2];
              g[a].at(n, ci, y, x) += gout * da;
              g[b].at(n, ci, y, x) += gout * db;
            }
          }
          ++loc2;
        }
      }
    }
  };
  return push(std::move(out), std::move(back));
}

template <typename S>
typename TapeT<S>::Id TapeT<S>::broadcast_mul(Id map, Id x) {
  const TensorT<S>& tm = value(map);
  const TensorT<S>& tx = value(x);
  if (tm.c != 1) throw DimensionError("broadcast_mul: map must be single-channel");
  if (tm.b != tx.b || tm.h != tx.h || tm.w != tx.w) {
    throw DimensionError("broadcast_mul: batch/spatial dims differ, " + tm.shape_str() + " vs " +
                         tx.shape_str());
  }
  TensorT<S> out(tx.b, tx.c, tx.h, tx.w);
  for (int n = 0; n < tx.b; ++n) {
    for (int ci = 0; ci < tx.c; ++ci) {
      for (int y = 0; y < tx.h; ++y) {
        for (int xo = 0; xo < tx.w; ++xo) {
          out.at(n, ci, y, xo) = tm.at(n, 0, y, xo) * tx.at(n, ci, y, xo);
        }
      }
    }
  }
  const Id out_id = size();
  auto back = [this, map, x, out_id](std::vector<TensorT<S>>& g) {
    const TensorT<S>& tm2 = value(map);
    const TensorT<S>& tx2 = value(x);
    const TensorT<S>& gout = g[out_id];
    for (int n = 0; n < tx2.b; ++n) {
      for (int ci = 0; ci < tx2.c; ++ci) {
        for (int y = 0; y < tx2.h; ++y) {
          for (int xo = 0; xo < tx2.w; ++xo) {
            const S go = gout.at(n, ci, y, xo);
            g[map].at(n, 0, y, xo) += go * tx2.at(n, ci, y, xo);
            g[x].at(n, ci, y, xo) += go * tm2.at(n, 0, y, xo);
          }
        }
      }
    }
  };
  return push(std::move(out), std::move(back));
}

template <typename S>
typename TapeT<S>::Id TapeT<S>::subpixel_upsample(Id x, int r) {
  const TensorT<S>& in = value(x);
  if (r < 1) throw ValueError("subpixel_upsample: r must be >= 1");
  if (in.c % (r * r) != 0) {
    throw DimensionError("subpixel_upsample: channels must be divisible by r^2, got " +
                         in.shape_str() + " with r " + std::to_string(r));
  }
  TensorT<S> out(in.b, in.c / (r * r), in.h * r, in.w * r);
  for (int n = 0; n < out.b; ++n) {
    for (int co = 0; co < out.c; ++co) {
      for (int y = 0; y < out.h; ++y) {
        for (int xo = 0; xo < out.w; ++xo) {
          out.at(n, co, y, xo) = in.at(n, co * r * r + (y % r) * r + (xo % r), y / r, xo / r);
        }
      }
    }
  }
  const Id out_id = size();
  auto back = [x, out_id, r](std::vector<TensorT<S>>& g) {
    const TensorT<S>& gout = g[out_id];
    for (int n = 0; n < gout.b; ++n) {
      for (int co = 0; co < gout.c; ++co) {
        for (int y = 0; y < gout.h; ++y) {
          for (int xo = 0; xo < gout.w; ++xo) {
            g[x].at(n, co * r * r + (y % r) * r + (xo % r), y / r, xo / r) +=
                gout.at(n, co, y, xo);
          }
        }
      }
    }
  };
  return push(std::move(out), std::move(back));
}

template <typename S>
typename TapeT<S>::Id TapeT<S>::l1_loss(Id pred, Id target) {
  const TensorT<S>& tp = value(pred);
  const TensorT<S>& tt = value(target);
  if (!tp.same_shape(tt)) {
    throw DimensionError("l1_loss: shapes differ, " + tp.shape_str() + " vs " + tt.shape_str());
  }
  S total = S(0);
  for (size_t i = 0; i < tp.data.size(); ++i) total += std::abs(tp.data[i] - tt.data[i]);
  TensorT<S> out(1, 1, 1, 1);
  out.data[0] = total / static_cast<S>(tp.data.size());
  const Id out_id = size();
  auto back = [this, pred, target, out_id](std::vector<TensorT<S>>& g) {
    const TensorT<S>& tp2 = value(pred);
    const TensorT<S>& tt2 = value(target);
    const S scale = g[out_id].data[0] / static_cast<S>(tp2.data.size());
    for (size_t i = 0; i < tp2.data.size(); ++i) {
      const S s = sign_of(tp2.data[i] - tt2.data[i]);
      g[pred].data[i] += scale * s;
      g[target].data[i] -= scale * s;
    }
  };
  return push(std::move(out), std::move(back));
}

template <typename S>
typename TapeT<S>::Id TapeT<S>::tv_l1(Id x) {
  const TensorT<S>& in = value(x);
  if (in.h < 2 || in.w < 2) {
    throw DimensionError("tv_l1: needs at least 2x2 spatial dims, got " + in.shape_str());
  }
  const S count_x = static_cast<S>(static_cast<size_t>(in.b) * in.c * in.h * (in.w - 1));
  const S count_y = static_cast<S>(static_cast<size_t>(in.b) * in.c * (in.h - 1) * in.w);
  S sum_x = S(0);
  S sum_y = S(0);
  for (int n = 0; n < in.b; ++n) {
    for (int ci = 0; ci < in.c; ++ci) {
      for (int y = 0; y < in.h; ++y) {
        for (int xo = 0; xo + 1 < in.w; ++xo) {
          sum_x += std::abs(in.at(n, ci, y, xo + 1) - in.at(n, ci, y, xo));
        }
      }
      for (int y = 0; y + 1 < in.h; ++y) {
        for (int xo = 0; xo < in.w; ++xo) {
          sum_y += std::abs(in.at(n, ci, y + 1, xo) - in.at(n, ci, y, xo));
        }
      }
    }
  }
  TensorT<S> out(1, 1, 1, 1);
  out.data[0] = sum_x / count_x + sum_y / count_y;
  const Id out_id = size();
  auto back = [this, x, out_id, count_x, count_y](std::vector<TensorT<S>>& g) {
    const TensorT<S>& in2 = value(x);
    const S go = g[out_id].data[0];
    const S gx = go / count_x;
    const S gy = go / count_y;
    for (int n = 0; n < in2.b; ++n) {
      for (int ci = 0; ci < in2.c; ++ci) {
        for (int y = 0; y < in2.h; ++y) {
          for (int xo = 0; xo + 1 < in2.w; ++xo) {
            const S s = sign_of(in2.at(n, ci, y, xo + 1) - in2.at(n, ci, y, xo));
            g[x].at(n, ci, y, xo + 1) += gx * s;
            g[x].at(n, ci, y, xo) -= gx * s;
          }
        }
        for (int y = 0; y + 1 < in2.h; ++y) {
          for (int xo = 0; xo < in2.w; ++xo) {
            const S s = sign_of(in2.at(n, ci, y + 1, xo) - in2.at(n, ci, y, xo));
            g[x].at(n, ci, y + 1, xo) += gy * s;
            g[x].at(n, ci, y, xo) -= gy * s;
          }
        }
      }
    }
  };
  return push(std::move(out), std::move(back));
}

template <typename S>
typename TapeT<S>::Id TapeT<S>::affine(Id x, S scale, S shift) {
  TensorT<S> out = value(x);
  for (S& v : out.data) v = scale * v + shift;
  const Id out_id = size();
  auto back = [x, out_id, scale](std::vector<TensorT<S>>& g) {
    for (size_t i = 0; i < g[x].data.size(); ++i) g[x].data[i] += scale * g[out_id].data[i];
  };
  return push(std::move(out), std::move(back));
}

template <typename S>
typename TapeT<S>::Id TapeT<S>::saturate01(Id x) {
  TensorT<S> out = value(x);
  for (S& v : out.data) v = std::min(std::max(v, S(0)), S(1));
  const Id out_id = size();
  auto back = [x, out_id](std::vector<TensorT<S>>& g) {
    for (size_t i = 0; i < g[x].data.size(); ++i) g[x].data[i] += g[out_id].data[i];
  };
  return push(std::move(out), std::move(back));
}

template <typename S>
typename TapeT<S>::Id TapeT<S>::scale_add(Id a, S alpha, Id b, S beta) {
  const TensorT<S>& ta = value(a);
  const TensorT<S>& tb = value(b);
  if (!ta.same_shape(tb)) {
    throw DimensionError("scale_add: shapes differ, " + ta.shape_str() + " vs " + tb.shape_str());
  }
  TensorT<S> out = TensorT<S>::zeros_like(ta);
  for (size_t i = 0; i < out.data.size(); ++i) {
    out.data[i] = alpha * ta.data[i] + beta * tb.data[i];
  }
  const Id out_id = size();
  auto back = [a, b, out_id, alpha, beta](std::vector<TensorT<S>>& g) {
    for (size_t i = 0; i < g[out_id].data.size(); ++i) {
      g[a].data[i] += alpha * g[out_id].data[i];
      g[b].data[i] += beta * g[out_id].data[i];
    }
  };
  return push(std::move(out), std::move(back));
}

template <typename S>
typename TapeT<S>::Id TapeT<S>::inner(Id x, TensorT<S> probe) {
  const TensorT<S>& in = value(x);
  if (!in.same_shape(probe)) {
    throw DimensionError("inner: probe shape " + probe.shape_str() + " differs from " +
                         in.shape_str());
  }
  S total = S(0);
  for (size_t i = 0; i < in.data.size(); ++i) total += in.data[i] * probe.data[i];
  TensorT<S> out(1, 1, 1, 1);
  out.data[0] = total;
  const Id out_id = size();
  auto back = [x, out_id, probe = std::move(probe)](std::vector<TensorT<S>>& g) {
    const S go = g[out_id].data[0];
    for (size_t i = 0; i < probe.data.size(); ++i) g[x].data[i] += go * probe.data[i];
  };
  return push(std::move(out), std::move(back));
}

template <typename S>
void TapeT<S>::backward(Id loss) {
  if (nodes_.empty()) throw ValueError("backward on an empty tape");
  check(loss);
  if (nodes_[loss].value.numel() != 1) {
    throw DimensionError("backward needs a scalar loss, got " + nodes_[loss].value.shape_str());
  }
  std::vector<TensorT<S>> g;
  g.reserve(static_cast<size_t>(loss) + 1);
  for (Id i = 0; i <= loss; ++i) g.push_back(TensorT<S>::zeros_like(nodes_[i].value));
  g[loss].data[0] = S(1);
  for (Id i = loss; i >= 0; --i) {
    if (nodes_[i].back) nodes_[i].back(g);
  }
  for (Id i = 0; i <= loss; ++i) {
    auto& dst = nodes_[i].grad.data;
    const auto& src = g[i].data;
    for (size_t j = 0; j < dst.size(); ++j) dst[j] += src[j];
  }
}

template class TapeT<float>;
template class TapeT<double>;

}  // namespace c2b
