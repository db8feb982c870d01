#include "nfsim/layers.hpp"

#include <cmath>
#include <stdexcept>

namespace nfsim {

namespace {

void require_2d(const Tensor& t, const char* who) {
    if (t.rank() != 2) throw std::invalid_argument(std::string(who) + ": expected a 2-D tensor");
}

} // namespace

Tensor matmul(const Tensor& a, const Tensor& b) {
    require_2d(a, "matmul");
    require_2d(b, "matmul");
    if (a.dim(1) != b.dim(0)) throw std::invalid_argument("matmul: inner dimension mismatch");
    const std::size_t m = a.dim(0), k = a.dim(1), n = b.dim(1);
    Tensor out({m, n});
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t p = 0; p < k; ++p) {
            const double aip = a.at(i, p);
            if (aip == 0.0) continue;
            for (std::size_t j = 0; j < n; ++j) {
                out.at(i, j) += aip * b.at(p, j);
            }
        }
    }
    return out;
}

Tensor matmul_tn(const Tensor& a, const Tensor& b) {
    require_2d(a, "matmul_tn");
    require_2d(b, "matmul_tn");
    if (a.dim(0) != b.dim(0)) throw std::invalid_argument("matmul_tn: inner dimension mismatch");
    const std::size_t m = a.dim(1), k = a.dim(0), n = b.dim(1);
    Tensor out({m, n});
    for (std::size_t p = 0; p < k; ++p) {
        for (std::size_t i = 0; i < m; ++i) {
            const double api = a.at(p, i);
            if (api == 0.0) continue;
            for (std::size_t j = 0; j < n; ++j) {
                out.at(i, j) += api * b.at(p, j);
            }
        }
    }
    return out;
}

Tensor matmul_nt(const Tensor& a, const Tensor& b) {
    require_2d(a, "matmul_nt");
    require_2d(b, "matmul_nt");
    if (a.dim(1) != b.dim(1)) throw std::invalid_argument("matmul_nt: inner dimension mismatch");
    const std::size_t m = a.dim(0), k = a.dim(1), n = b.dim(0);
    Tensor out({m, n});
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            double acc = 0.0;
            for (std::size_t p = 0; p < k; ++p) acc += a.at(i, p) * b.at(j, p);
            out.at(i, j) = acc;
        }
    }
    return out;
}

// ---------------------------------------------------------------- Linear

Linear::Linear(ParamStore& ps, const std::string& name, std::size_t d_in, std::size_t d_out,
               RandomStream& rng)
    : d_in_(d_in), d_out_(d_out) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(d_in));
    w_ = ps.add(name + ".w", uniform_init({d_in, d_out}, bound, rng));
    b_ = ps.add(name + ".b", Tensor({d_out}));
}

Tensor Linear::forward(const Tensor& x) {
    require_2d(x, "Linear::forward");
    if (x.dim(1) != d_in_) throw std::invalid_argument("Linear::forward: input width mismatch");
    x_ = x;
    Tensor y = matmul(x, w_->value);
    for (std::size_t t = 0; t < y.dim(0); ++t) {
        for (std::size_t j = 0; j < d_out_; ++j) y.at(t, j) += b_->value.at(j);
    }
    return y;
}

Tensor Linear::backward(const Tensor& grad_out) {
    // dW += X^T dY; db += column sums of dY; dX = dY W^T
    Tensor dw = matmul_tn(x_, grad_out);
    for (std::size_t i = 0; i < dw.size(); ++i) w_->grad.v[i] += dw.v[i];
    for (std::size_t t = 0; t < grad_out.dim(0); ++t) {
        for (std::size_t j = 0; j < d_out_; ++j) b_->grad.at(j) += grad_out.at(t, j);
    }
    return matmul_nt(grad_out, w_->value);
}

// ------------------------------------------------------------- LayerNorm

LayerNorm::LayerNorm(ParamStore& ps, const std::string& name, std::size_t dim) : dim_(dim) {
    Tensor gain({dim});
    gain.fill(1.0);
    gain_ = ps.add(name + ".gain", std::move(gain));
    shift_ = ps.add(name + ".shift", Tensor({dim}));
}

Tensor LayerNorm::forward(const Tensor& x) {
    require_2d(x, "LayerNorm::forward");
    if (x.dim(1) != dim_) throw std::invalid_argument("LayerNorm::forward: width mismatch");
    x_ = x;
    const std::size_t rows = x.dim(0);
    mean_.assign(rows, 0.0);
    inv_std_.assign(rows, 0.0);
    Tensor y({rows, dim_});
    for (std::size_t t = 0; t < rows; ++t) {
        double mu = 0.0;
        for (std::size_t j = 0; j < dim_; ++j) mu += x.at(t, j);
        mu /= static_cast<double>(dim_);
        double var = 0.0;
        for (std::size_t j = 0; j < dim_; ++j) {
            const double d = x.at(t, j) - mu;
            var += d * d;
        }
        var /= static_cast<double>(dim_);
        const double inv = 1.0 / std::sqrt(var + kEps);
        mean_[t] = mu;
        inv_std_[t] = inv;
        for (std::size_t j = 0; j < dim_; ++j) {
            y.at(t, j) = gain_->value.at(j) * (x.at(t, j) - mu) * inv + shift_->value.at(j);
        }
    }
    return y;
}

Tensor LayerNorm::backward(const Tensor& grad_out) {
    const std::size_t rows = x_.dim(0);
    const double d = static_cast<double>(dim_);
    Tensor dx({rows, dim_});
    for (std::size_t t = 0; t < rows; ++t) {
        const double mu = mean_[t];
        const double inv = inv_std_[t];
        double sum_dxhat = 0.0;
        double sum_dxhat_xc = 0.0;
        for (std::size_t j = 0; j < dim_; ++j) {
            const double xc = x_.at(t, j) - mu;
            const double xhat = xc * inv;
            const double dy = grad_out.at(t, j);
            gain_->grad.at(j) += dy * xhat;
            shift_->grad.at(j) += dy;
            const double dxhat = dy * gain_->value.at(j);
            sum_dxhat += dxhat;
            sum_dxhat_xc += dxhat * xc;
        }
        const double dvar = sum_dxhat_xc * (-0.5) * inv * inv * inv;
        const double dmean = -inv * sum_dxhat;  // sum of (x - mu) is zero
        for (std::size_t j = 0; j < dim_; ++j) {
            const double xc = x_.at(t, j) - mu;
            const double dxhat = grad_out.at(t, j) * gain_->value.at(j);
            dx.at(t, j) = dxhat * inv + dvar * 2.0 * xc / d + dmean / d;
        }
    }
    return dx;
}

// ----------------------------------------------------------- SoftmaxRows

Tensor SoftmaxRows::apply(const Tensor& x) {
    Tensor y(x.shape);
    const std::size_t rows = x.dim(0), cols = x.dim(1);
    for (std::size_t t = 0; t < rows; ++t) {
        double mx = x.at(t, 0);
        for (std::size_t j = 1; j < cols; ++j) mx = std::max(mx, x.at(t, j));
        double sum = 0.0;
        for (std::size_t j = 0; j < cols; ++j) {
            const double e = std::exp(x.at(t, j) - mx);
            y.at(t, j) = e;
            sum += e;
        }
        for (std::size_t j = 0; j < cols; ++j) y.at(t, j) /= sum;
    }
    return y;
}

Tensor SoftmaxRows::grad(const Tensor& y, const Tensor& grad_out) {
    Tensor dx(y.shape);
    const std::size_t rows = y.dim(0), cols = y.dim(1);
    for (std::size_t t = 0; t < rows; ++t) {
        double dot = 0.0;
        for (std::size_t j = 0; j < cols; ++j) dot += grad_out.at(t, j) * y.at(t, j);
        for (std::size_t j = 0; j < cols; ++j) {
            dx.at(t, j) = y.at(t, j) * (grad_out.at(t, j) - dot);
        }
    }
    return dx;
}

Tensor SoftmaxRows::forward(const Tensor& x) {
    require_2d(x, "SoftmaxRows::forward");
    y_ = apply(x);
    return y_;
}

Tensor SoftmaxRows::backward(const Tensor& grad_out) {
    return grad(y_, grad_out);
}

// ------------------------------------------------------------ Activation

double Activation::apply_scalar(ActivationKind kind, double x) {
    switch (kind) {
        case ActivationKind::relu: return x > 0.0 ? x : 0.0;
        case ActivationKind::sigmoid: return 1.0 / (1.0 + std::exp(-x));
        case ActivationKind::tanh: return std::tanh(x);
    }
    return 0.0;
}

Tensor Activation::forward(const Tensor& x) {
    x_ = x;
    Tensor y(x.shape);
    for (std::size_t i = 0; i < x.size(); ++i) y.v[i] = apply_scalar(kind_, x.v[i]);
    y_ = y;
    return y;
}

Tensor Activation::backward(const Tensor& grad_out) {
    Tensor dx(x_.shape);
    for (std::size_t i = 0; i < x_.size(); ++i) {
        double g = 0.0;
        switch (kind_) {
            case ActivationKind::relu: g = x_.v[i] > 0.0 ? 1.0 : 0.0; break;
            case ActivationKind::sigmoid: g = y_.v[i] * (1.0 - y_.v[i]); break;
            case ActivationKind::tanh: g = 1.0 - y_.v[i] * y_.v[i]; break;
        }
        dx.v[i] = grad_out.v[i] * g;
    }
    return dx;
}

// ---------------------------------------------------------------- Conv1d

Conv1d::Conv1d(ParamStore& ps, const std::string& name, std::size_t c_in, std::size_t c_out,
               std::size_t kernel, RandomStream& rng)
    : c_in_(c_in), c_out_(c_out), kernel_(kernel) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(kernel * c_in));
    k_ = ps.add(name + ".k", uniform_init({kernel, c_in, c_out}, bound, rng));
    b_ = ps.add(name + ".b", Tensor({c_out}));
}

Tensor Conv1d::forward(const Tensor& x) {
    require_2d(x, "Conv1d::forward");
    if (x.dim(1) != c_in_) throw std::invalid_argument("Conv1d::forward: channel mismatch");
    x_ = x;
    const std::size_t t_len = x.dim(0);
    const long pad = static_cast<long>((kernel_ - 1) / 2);
    Tensor y({t_len, c_out_});
    for (std::size_t t = 0; t < t_len; ++t) {
        for (std::size_t co = 0; co < c_out_; ++co) y.at(t, co) = b_->value.at(co);
        for (std::size_t u = 0; u < kernel_; ++u) {
            const long src = static_cast<long>(t) + static_cast<long>(u) - pad;
            if (src < 0 || src >= static_cast<long>(t_len)) continue;
            for (std::size_t ci = 0; ci < c_in_; ++ci) {
                const double xv = x.at(static_cast<std::size_t>(src), ci);
                if (xv == 0.0) continue;
                for (std::size_t co = 0; co < c_out_; ++co) {
                    y.at(t, co) += xv * k_->value.at(u, ci, co);
                }
            }
        }
    }
    return y;
}

Tensor Conv1d::backward(const Tensor& grad_out) {
    const std::size_t t_len = x_.dim(0);
    const long pad = static_cast<long>((kernel_ - 1) / 2);
    Tensor dx({t_len, c_in_});
    for (std::size_t t = 0; t < t_len; ++t) {
        for (std::size_t co = 0; co < c_out_; ++co) {
            const double dy = grad_out.at(t, co);
            if (dy == 0.0) continue;
            b_->grad.at(co) += dy;
            for (std::size_t u = 0; u < kernel_; ++u) {
                const long src = static_cast<long>(t) + static_cast<long>(u) - pad;
                if (src < 0 || src >= static_cast<long>(t_len)) continue;
                for (std::size_t ci = 0; ci < c_in_; ++ci) {
                    k_->grad.at(u, ci, co) += x_.at(static_cast<std::size_t>(src), ci) * dy;
                    dx.at(static_cast<std::size_t>(src), ci) += k_->value.at(u, ci, co) * dy;
                }
            }
        }
    }
    return dx;
}

// ------------------------------------------------------------------ Mhsa

Mhsa::Mhsa(ParamStore& ps, const std::string& name, std::size_t d_model, std::size_t heads,
           std::size_t d_k, std::size_t d_v, RandomStream& rng)
    : d_model_(d_model), heads_(heads), d_k_(d_k), d_v_(d_v) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(d_model));
    wq_ = ps.add(name + ".wq", uniform_init({d_model, heads * d_k}, bound, rng));
    wk_ = ps.add(name + ".wk", uniform_init({d_model, heads * d_k}, bound, rng));
    wv_ = ps.add(name + ".wv", uniform_init({d_model, heads * d_v}, bound, rng));
    const double bound_o = 1.0 / std::sqrt(static_cast<double>(heads * d_v));
    wo_ = ps.add(name + ".wo", uniform_init({heads * d_v, d_model}, bound_o, rng));
}

namespace {

Tensor head_slice(const Tensor& m, std::size_t head, std::size_t width) {
    const std::size_t rows = m.dim(0);
    Tensor out({rows, width});
    for (std::size_t t = 0; t < rows; ++t) {
        for (std::size_t j = 0; j < width; ++j) out.at(t, j) = m.at(t, head * width + j);
    }
    return out;
}

void head_unslice(Tensor& m, const Tensor& part, std::size_t head, std::size_t width) {
    for (std::size_t t = 0; t < part.dim(0); ++t) {
        for (std::size_t j = 0; j < width; ++j) m.at(t, head * width + j) += part.at(t, j);
    }
}

} // namespace

Tensor Mhsa::forward(const Tensor& x) {
    require_2d(x, "Mhsa::forward");
    if (x.dim(1) != d_model_) throw std::invalid_argument("Mhsa::forward: width mismatch");
    x_ = x;
    q_ = matmul(x, wq_->value);
    k_ = matmul(x, wk_->value);
    v_ = matmul(x, wv_->value);
    const std::size_t t_len = x.dim(0);
    const double scale = 1.0 / std::sqrt(static_cast<double>(d_k_));

    concat_ = Tensor({t_len, heads_ * d_v_});
    attn_.assign(heads_, Tensor());
    for (std::size_t hidx = 0; hidx < heads_; ++hidx) {
        const Tensor qi = head_slice(q_, hidx, d_k_);
        const Tensor ki = head_slice(k_, hidx, d_k_);
        const Tensor vi = head_slice(v_, hidx, d_v_);
        Tensor scores = matmul_nt(qi, ki);
        for (auto& s : scores.v) s *= scale;
        attn_[hidx] = SoftmaxRows::apply(scores);
        const Tensor hi = matmul(attn_[hidx], vi);
        for (std::size_t t = 0; t < t_len; ++t) {
            for (std::size_t j = 0; j < d_v_; ++j) concat_.at(t, hidx * d_v_ + j) = hi.at(t, j);
        }
    }
    return matmul(concat_, wo_->value);
}

Tensor Mhsa::backward(const Tensor& grad_out) {
    const std::size_t t_len = x_.dim(0);
    const double scale = 1.0 / std::sqrt(static_cast<double>(d_k_));

    Tensor dwo = matmul_tn(concat_, grad_out);
    for (std::size_t i = 0; i < dwo.size(); ++i) wo_->grad.v[i] += dwo.v[i];
    const Tensor dconcat = matmul_nt(grad_out, wo_->value);

    Tensor dq({t_len, heads_ * d_k_});
    Tensor dk({t_len, heads_ * d_k_});
    Tensor dv({t_len, heads_ * d_v_});
    for (std::size_t hidx = 0; hidx < heads_; ++hidx) {
        const Tensor qi = head_slice(q_, hidx, d_k_);
        const Tensor ki = head_slice(k_, hidx, d_k_);
        const Tensor vi = head_slice(v_, hidx, d_v_);
        const Tensor dhi = head_slice(dconcat, hidx, d_v_);

        const Tensor da = matmul_nt(dhi, vi);            // [T, T]
        const Tensor dvi = matmul_tn(attn_[hidx], dhi);  // [T, d_v]
        Tensor ds = SoftmaxRows::grad(attn_[hidx], da);
        for (auto& s : ds.v) s *= scale;
        const Tensor dqi = matmul(ds, ki);
        const Tensor dki = matmul_tn(ds, qi);

        head_unslice(dq, dqi, hidx, d_k_);
        head_unslice(dk, dki, hidx, d_k_);
        head_unslice(dv, dvi, hidx, d_v_);
    }

    Tensor dwq = matmul_tn(x_, dq);
    Tensor dwk = matmul_tn(x_, dk);
    Tensor dwv = matmul_tn(x_, dv);
    for (std::size_t i = 0; i < dwq.size(); ++i) wq_->grad.v[i] += dwq.v[i];
    for (std::size_t i = 0; i < dwk.size(); ++i) wk_->grad.v[i] += dwk.v[i];
    for (std::size_t i = 0; i < dwv.size(); ++i) wv_->grad.v[i] += dwv.v[i];

    Tensor dx = matmul_nt(dq, wq_->value);
    const Tensor dx_k = matmul_nt(dk, wk_->value);
    const Tensor dx_v = matmul_nt(dv, wv_->value);
    for (std::size_t i = 0; i < dx.size(); ++i) dx.v[i] += dx_k.v[i] + dx_v.v[i];
    return dx;
}

// ---------------------------------------------------------------- losses

double mse_loss(const Tensor& pred, const Tensor& target, Tensor* grad) {
    if (!pred.same_shape(target)) throw std::invalid_argument("mse_loss: shape mismatch");
    const double batch = pred.rank() >= 2 ? static_cast<double>(pred.dim(0)) : 1.0;
    double loss = 0.0;
    if (grad) *grad = Tensor(pred.shape);
    for (std::size_t i = 0; i < pred.size(); ++i) {
        const double d = pred.v[i] - target.v[i];
        loss += d * d;
        if (grad) grad->v[i] = 2.0 * d / batch;
    }
    return loss / batch;
}

double bce_loss(const Tensor& pred, const Tensor& labels, double eps, Tensor* grad) {
    if (!pred.same_shape(labels)) throw std::invalid_argument("bce_loss: shape mismatch");
    const double n = static_cast<double>(pred.size());
    double loss = 0.0;
    if (grad) *grad = Tensor(pred.shape);
    for (std::size_t i = 0; i < pred.size(); ++i) {
        const double p = pred.v[i];
        const double b = labels.v[i];
        loss -= b * std::log(p + eps) + (1.0 - b) * std::log(1.0 - p + eps);
        if (grad) grad->v[i] = -(b / (p + eps) - (1.0 - b) / (1.0 - p + eps)) / n;
    }
    return loss / n;
}

} // namespace nfsim
