#include "tnk/linalg.hpp"

#include <Eigen/Dense>

#include <cmath>

namespace tnk {

namespace {

using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

RowMat to_eigen(const Tensor& a) {
    if (a.order() != 2) throw std::invalid_argument("expected a matrix");
    return Eigen::Map<const RowMat>(a.values().data(), static_cast<Eigen::Index>(a.dim(0)),
                                    static_cast<Eigen::Index>(a.dim(1)));
}

Tensor from_eigen(const RowMat& m) {
    std::vector<double> v(m.data(), m.data() + m.size());
    return Tensor::from_values({static_cast<std::size_t>(m.rows()), static_cast<std::size_t>(m.cols())},
                               std::move(v));
}

// Flip column signs of U (and the matching rows of Vt) so the
// largest-magnitude entry of each U column is positive; ties take the
// lowest row index.
void fix_signs(RowMat& u, RowMat* vt) {
    for (Eigen::Index c = 0; c < u.cols(); ++c) {
        Eigen::Index best = 0;
        double best_abs = -1.0;
        for (Eigen::Index r = 0; r < u.rows(); ++r) {
            const double a = std::abs(u(r, c));
            if (a > best_abs) {
                best_abs = a;
                best = r;
            }
        }
        if (u(best, c) < 0.0) {
            u.col(c) = -u.col(c);
            if (vt) vt->row(c) = -vt->row(c);
        }
    }
}

}  // namespace

SvdResult svd(const Tensor& a) {
    RowMat m = to_eigen(a);
    Eigen::JacobiSVD<RowMat> solver(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
    RowMat u = solver.matrixU();
    RowMat vt = solver.matrixV().transpose();
    fix_signs(u, &vt);
    const auto& s = solver.singularValues();
    return SvdResult{from_eigen(u), std::vector<double>(s.data(), s.data() + s.size()), from_eigen(vt)};
}

QrResult qr(const Tensor& a) {
    RowMat m = to_eigen(a);
    const Eigen::Index k = std::min(m.rows(), m.cols());
    Eigen::HouseholderQR<RowMat> solver(m);
    RowMat q = solver.householderQ() * RowMat::Identity(m.rows(), k);
    RowMat r = solver.matrixQR().topRows(k).triangularView<Eigen::Upper>();
    for (Eigen::Index i = 0; i < k; ++i) {
        if (r(i, i) < 0.0) {
            r.row(i) = -r.row(i);
            q.col(i) = -q.col(i);
        }
    }
    return QrResult{from_eigen(q), from_eigen(r)};
}

std::size_t numerical_rank(const std::vector<double>& sigma, double rel_tol) {
    if (sigma.empty()) return 0;
    const double cutoff = rel_tol * sigma.front();
    std::size_t r = 0;
    for (double s : sigma)
        if (s > cutoff) ++r;
    return r;
}

std::size_t numerical_rank(const Tensor& a, double rel_tol) {
    return numerical_rank(svd(a).sigma, rel_tol);
}

Tensor sqrt_psd(const Tensor& a) {
    if (a.order() != 2 || a.dim(0) != a.dim(1))
        throw std::invalid_argument("sqrt_psd requires a square matrix");
    RowMat m = to_eigen(a);
    if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-10 * (1.0 + m.cwiseAbs().maxCoeff()))
        throw std::invalid_argument("sqrt_psd requires a symmetric matrix");
    Eigen::SelfAdjointEigenSolver<RowMat> solver(m);
    Eigen::VectorXd ev = solver.eigenvalues();
    for (Eigen::Index i = 0; i < ev.size(); ++i) {
        if (ev(i) < -1e-10) throw std::invalid_argument("sqrt_psd requires a PSD matrix");
        ev(i) = std::sqrt(std::max(0.0, ev(i)));
    }
    RowMat vecs = solver.eigenvectors();
    fix_signs(vecs, nullptr);
    RowMat root = vecs * ev.asDiagonal() * vecs.transpose();
    return from_eigen(root);
}

}  // namespace tnk
