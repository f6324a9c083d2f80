#include "cawcl/tape.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>

namespace cawcl {

ValueId Tape::push(Tensor2 v, std::function<void(Tape&)> back) {
    Node n;
    n.grad = Tensor2(v.rows(), v.cols());
    n.value = std::move(v);
    n.back = std::move(back);
    nodes_.push_back(std::move(n));
    return ValueId{static_cast<int>(nodes_.size()) - 1};
}

void Tape::check(ValueId id) const {
    if (!id.valid() || id.idx >= static_cast<int>(nodes_.size()))
        throw IndexOutOfRange("Tape: invalid node id");
}

ValueId Tape::input(Tensor2 v) { return push(std::move(v), nullptr); }

ValueId Tape::constant(double c) {
    Tensor2 v(1, 1);
    v.at(0, 0) = c;
    return push(std::move(v), nullptr);
}

ValueId Tape::param(Tensor2* p) {
    ValueId id = push(*p, nullptr);
    params_.emplace_back(p, id.idx);
    return id;
}

double Tape::scalar(ValueId id) const {
    check(id);
    const Tensor2& v = nodes_[id.idx].value;
    if (v.size() != 1) throw ShapeMismatch("Tape::scalar: node is not 1x1");
    return v.at(0, 0);
}

ValueId Tape::matmul(ValueId a, ValueId b) {
    check(a); check(b);
    Tensor2 out = cawcl::matmul(value(a), value(b));
    int self = static_cast<int>(nodes_.size());
    return push(std::move(out), [a, b, self](Tape& t) {
        const Tensor2& g = t.nodes_[self].grad;
        add_inplace(t.grad_mut(a), matmul_nt(g, t.value(b)));
        add_inplace(t.grad_mut(b), matmul_tn(t.value(a), g));
    });
}

ValueId Tape::add(ValueId a, ValueId b) {
    check(a); check(b);
    if (!value(a).same_shape(value(b))) throw ShapeMismatch("Tape::add: shape mismatch");
    Tensor2 out = value(a);
    add_inplace(out, value(b));
    int self = static_cast<int>(nodes_.size());
    return push(std::move(out), [a, b, self](Tape& t) {
        const Tensor2& g = t.nodes_[self].grad;
        add_inplace(t.grad_mut(a), g);
        add_inplace(t.grad_mut(b), g);
    });
}

ValueId Tape::add_rowvec(ValueId a, ValueId v) {
    check(a); check(v);
    const Tensor2& av = value(a);
    const Tensor2& vv = value(v);
    if (vv.rows() != 1 || vv.cols() != av.cols())
        throw ShapeMismatch("Tape::add_rowvec: bias must be 1 x cols(a)");
    Tensor2 out = av;
    for (int i = 0; i < out.rows(); ++i)
        for (int j = 0; j < out.cols(); ++j) out.at(i, j) += vv.at(0, j);
    int self = static_cast<int>(nodes_.size());
    return push(std::move(out), [a, v, self](Tape& t) {
        const Tensor2& g = t.nodes_[self].grad;
        add_inplace(t.grad_mut(a), g);
        Tensor2& gv = t.grad_mut(v);
        for (int j = 0; j < g.cols(); ++j) {
            CompensatedSum acc;
            for (int i = 0; i < g.rows(); ++i) acc.add(g.at(i, j));
            gv.at(0, j) += acc.result();
        }
    });
}

ValueId Tape::affine(ValueId a, double mul, double shift) {
    check(a);
    Tensor2 out = value(a);
    for (double& x : out.vec()) x = mul * x + shift;
    int self = static_cast<int>(nodes_.size());
    return push(std::move(out), [a, mul, self](Tape& t) {
        axpy_inplace(t.grad_mut(a), mul, t.nodes_[self].grad);
    });
}

ValueId Tape::elu(ValueId a) {
    check(a);
    Tensor2 out = value(a);
    for (double& x : out.vec()) x = x > 0.0 ? x : std::expm1(x);
    int self = static_cast<int>(nodes_.size());
    return push(std::move(out), [a, self](Tape& t) {
        const Tensor2& g = t.nodes_[self].grad;
        const Tensor2& in = t.value(a);
        Tensor2& ga = t.grad_mut(a);
        for (int i = 0; i < g.size(); ++i) {
            const double x = in.vec()[i];
            ga.vec()[i] += g.vec()[i] * (x > 0.0 ? 1.0 : std::exp(x));
        }
    });
}

ValueId Tape::grl(ValueId a, double scale) {
    check(a);
    Tensor2 out = value(a);
    int self = static_cast<int>(nodes_.size());
    return push(std::move(out), [a, scale, self](Tape& t) {
        axpy_inplace(t.grad_mut(a), -scale, t.nodes_[self].grad);
    });
}

ValueId Tape::detach(ValueId a) {
    check(a);
    return push(value(a), nullptr);
}

ValueId Tape::select_rows(ValueId a, std::vector<int> rows) {
    check(a);
    const Tensor2& av = value(a);
    Tensor2 out(static_cast<int>(rows.size()), av.cols());
    for (size_t i = 0; i < rows.size(); ++i) {
        if (rows[i] < 0 || rows[i] >= av.rows()) throw IndexOutOfRange("select_rows: row out of range");
        for (int j = 0; j < av.cols(); ++j) out.at(static_cast<int>(i), j) = av.at(rows[i], j);
    }
    int self = static_cast<int>(nodes_.size());
    return push(std::move(out), [a, rows = std::move(rows), self](Tape& t) {
        const Tensor2& g = t.nodes_[self].grad;
        Tensor2& ga = t.grad_mut(a);
        for (size_t i = 0; i < rows.size(); ++i)
            for (int j = 0; j < g.cols(); ++j) ga.at(rows[i], j) += g.at(static_cast<int>(i), j);
    });
}

ValueId Tape::group_mean_rows(ValueId a, std::vector<int> group_sizes) {
    check(a);
    const Tensor2& av = value(a);
    int total = 0;
    for (int s : group_sizes) {
        if (s < 1) throw EmptyTracklet("group_mean_rows: empty group");
        total += s;
    }
    if (total != av.rows()) throw ShapeMismatch("group_mean_rows: group sizes do not cover rows");
    Tensor2 out(static_cast<int>(group_sizes.size()), av.cols());
    int r = 0;
    for (size_t gidx = 0; gidx < group_sizes.size(); ++gidx) {
        for (int j = 0; j < av.cols(); ++j) {
            CompensatedSum acc;
            for (int k = 0; k < group_sizes[gidx]; ++k) acc.add(av.at(r + k, j));
            out.at(static_cast<int>(gidx), j) = acc.result() / group_sizes[gidx];
        }
        r += group_sizes[gidx];
    }
    int self = static_cast<int>(nodes_.size());
    return push(std::move(out), [a, sizes = std::move(group_sizes), self](Tape& t) {
        const Tensor2& g = t.nodes_[self].grad;
        Tensor2& ga = t.grad_mut(a);
        int row = 0;
        for (size_t gidx = 0; gidx < sizes.size(); ++gidx) {
            for (int k = 0; k < sizes[gidx]; ++k)
                for (int j = 0; j < g.cols(); ++j)
                    ga.at(row + k, j) += g.at(static_cast<int>(gidx), j) / sizes[gidx];
            row += sizes[gidx];
        }
    });
}

ValueId Tape::l2_normalize_rows(ValueId a) {
    check(a);
    const Tensor2& av = value(a);
    Tensor2 out(av.rows(), av.cols());
    for (int i = 0; i < av.rows(); ++i) {
        const auto n = l2_normalize(av.row_span(i));
        std::copy(n.begin(), n.end(), out.row_span(i).begin());
    }
    int self = static_cast<int>(nodes_.size());
    return push(std::move(out), [a, self](Tape& t) {
        // y = x/||x||;  dx = (g - (g.y) y) / ||x||
        const Tensor2& g = t.nodes_[self].grad;
        const Tensor2& y = t.nodes_[self].value;
        const Tensor2& x = t.value(a);
        Tensor2& ga = t.grad_mut(a);
        for (int i = 0; i < g.rows(); ++i) {
            const double nrm = l2_norm(x.row_span(i));
            const double gy = cdot(g.row_span(i), y.row_span(i));
            for (int j = 0; j < g.cols(); ++j)
                ga.at(i, j) += (g.at(i, j) - gy * y.at(i, j)) / nrm;
        }
    });
}

ValueId Tape::log_softmax_rows(ValueId a) {
    check(a);
    const Tensor2& av = value(a);
    Tensor2 out(av.rows(), av.cols());
    for (int i = 0; i < av.rows(); ++i) {
        const auto ls = log_softmax(av.row_span(i));
        std::copy(ls.begin(), ls.end(), out.row_span(i).begin());
    }
    int self = static_cast<int>(nodes_.size());
    return push(std::move(out), [a, self](Tape& t) {
        // dx_k = g_k - softmax(x)_k * sum_j g_j
        const Tensor2& g = t.nodes_[self].grad;
        const Tensor2& y = t.nodes_[self].value;
        Tensor2& ga = t.grad_mut(a);
        for (int i = 0; i < g.rows(); ++i) {
            const double gsum = csum(g.row_span(i));
            for (int j = 0; j < g.cols(); ++j)
                ga.at(i, j) += g.at(i, j) - std::exp(y.at(i, j)) * gsum;
        }
    });
}

ValueId Tape::select_entries(ValueId a, std::vector<int> rows, std::vector<int> cols) {
    check(a);
    if (rows.size() != cols.size()) throw ShapeMismatch("select_entries: rows/cols length mismatch");
    const Tensor2& av = value(a);
    Tensor2 out(static_cast<int>(rows.size()), 1);
    for (size_t i = 0; i < rows.size(); ++i) {
        if (rows[i] < 0 || rows[i] >= av.rows() || cols[i] < 0 || cols[i] >= av.cols())
            throw IndexOutOfRange("select_entries: index out of range");
        out.at(static_cast<int>(i), 0) = av.at(rows[i], cols[i]);
    }
    int self = static_cast<int>(nodes_.size());
    return push(std::move(out),
                [a, rows = std::move(rows), cols = std::move(cols), self](Tape& t) {
                    const Tensor2& g = t.nodes_[self].grad;
                    Tensor2& ga = t.grad_mut(a);
                    for (size_t i = 0; i < rows.size(); ++i)
                        ga.at(rows[i], cols[i]) += g.at(static_cast<int>(i), 0);
                });
}

ValueId Tape::masked_logsumexp_rows(ValueId a, std::vector<std::vector<int>> cols) {
    check(a);
    const Tensor2& av = value(a);
    if (static_cast<int>(cols.size()) != av.rows())
        throw ShapeMismatch("masked_logsumexp_rows: one column list per row required");
    Tensor2 out(av.rows(), 1);
    for (int i = 0; i < av.rows(); ++i) {
        if (cols[i].empty()) {
            out.at(i, 0) = 0.0;
            continue;
        }
        double mx = -std::numeric_limits<double>::infinity();
        for (int j : cols[i]) {
            if (j < 0 || j >= av.cols()) throw IndexOutOfRange("masked_logsumexp_rows: column out of range");
            mx = std::max(mx, av.at(i, j));
        }
        CompensatedSum acc;
        for (int j : cols[i]) acc.add(std::exp(av.at(i, j) - mx));
        out.at(i, 0) = mx + std::log(acc.result());
    }
    int self = static_cast<int>(nodes_.size());
    return push(std::move(out), [a, cols = std::move(cols), self](Tape& t) {
        const Tensor2& g = t.nodes_[self].grad;
        const Tensor2& lse = t.nodes_[self].value;
        const Tensor2& x = t.value(a);
        Tensor2& ga = t.grad_mut(a);
        for (size_t i = 0; i < cols.size(); ++i) {
            if (cols[i].empty()) continue;
            const int r = static_cast<int>(i);
            for (int j : cols[i]) ga.at(r, j) += g.at(r, 0) * std::exp(x.at(r, j) - lse.at(r, 0));
        }
    });
}

ValueId Tape::weighted_sum_all(ValueId a, Tensor2 w) {
    check(a);
    const Tensor2& av = value(a);
    if (!av.same_shape(w)) throw ShapeMismatch("weighted_sum_all: weight shape mismatch");
    Tensor2 out(1, 1);
    CompensatedSum acc;
    for (int i = 0; i < av.size(); ++i) acc.add(av.vec()[i] * w.vec()[i]);
    out.at(0, 0) = acc.result();
    int self = static_cast<int>(nodes_.size());
    return push(std::move(out), [a, w = std::move(w), self](Tape& t) {
        const double g = t.nodes_[self].grad.at(0, 0);
        Tensor2& ga = t.grad_mut(a);
        for (int i = 0; i < ga.size(); ++i) ga.vec()[i] += g * w.vec()[i];
    });
}

ValueId Tape::sum_all(ValueId a) {
    check(a);
    Tensor2 out(1, 1);
    out.at(0, 0) = csum({value(a).data(), static_cast<size_t>(value(a).size())});
    int self = static_cast<int>(nodes_.size());
    return push(std::move(out), [a, self](Tape& t) {
        const double g = t.nodes_[self].grad.at(0, 0);
        Tensor2& ga = t.grad_mut(a);
        for (double& x : ga.vec()) x += g;
    });
}

ValueId Tape::mean_all(ValueId a) {
    check(a);
    const int n = value(a).size();
    if (n == 0) throw EmptyInput("mean_all: empty tensor");
    ValueId s = sum_all(a);
    return scale(s, 1.0 / n);
}

ValueId Tape::mul(ValueId a, ValueId b) {
    check(a); check(b);
    if (!value(a).same_shape(value(b))) throw ShapeMismatch("Tape::mul: shape mismatch");
    Tensor2 out = value(a);
    for (int i = 0; i < out.size(); ++i) out.vec()[i] *= value(b).vec()[i];
    int self = static_cast<int>(nodes_.size());
    return push(std::move(out), [a, b, self](Tape& t) {
        const Tensor2& g = t.nodes_[self].grad;
        const Tensor2& av = t.value(a);
        const Tensor2& bv = t.value(b);
        Tensor2& ga = t.grad_mut(a);
        Tensor2& gb = t.grad_mut(b);
        for (int i = 0; i < g.size(); ++i) {
            ga.vec()[i] += g.vec()[i] * bv.vec()[i];
            gb.vec()[i] += g.vec()[i] * av.vec()[i];
        }
    });
}

ValueId Tape::scale(ValueId a, double c) { return affine(a, c, 0.0); }

void Tape::backward(ValueId root) {
    check(root);
    if (value(root).size() != 1) throw ShapeMismatch("backward: root must be 1x1");
    for (Node& n : nodes_) n.grad.fill(0.0);
    nodes_[root.idx].grad.at(0, 0) = 1.0;
    for (int i = root.idx; i >= 0; --i) {
        if (nodes_[i].back) nodes_[i].back(*this);
    }
}

const Tensor2& Tape::grad_of(const Tensor2* p) const {
    for (const auto& [ptr, idx] : params_) {
        if (ptr == p) return nodes_[idx].grad;
    }
    throw IndexOutOfRange("grad_of: parameter not registered on this tape");
}

std::vector<GradRecord> Tape::param_grads() const {
    std::vector<GradRecord> out;
    out.reserve(params_.size());
    for (const auto& [ptr, idx] : params_) out.push_back({ptr, nodes_[idx].grad});
    return out;
}

} // namespace cawcl
