#pragma once

#include <memory>

#include <Eigen/Core>
#include <Eigen/SparseCore>
#ifdef GRIDSWITCH_HAVE_KLU
#include <klu.h>
#else
#include <Eigen/OrderingMethods>
#include <Eigen/SparseLU>
#endif

namespace gridswitch {

using RealSparse = Eigen::SparseMatrix<double, Eigen::ColMajor, int>;

#ifdef GRIDSWITCH_HAVE_KLU

/// Sparse LU for repeated factorizations of one fixed pattern: analyze()
/// once, then factorize() per numeric update. Later factorizations reuse the
/// pivot sequence and fall back to a fresh pivoting pass when it degrades.
class SparseLu {
public:
    SparseLu() { klu_defaults(&common_); }
    SparseLu(const SparseLu&) = delete;
    SparseLu& operator=(const SparseLu&) = delete;
    SparseLu(SparseLu&& o) noexcept { *this = std::move(o); }
    SparseLu& operator=(SparseLu&& o) noexcept {
        if (this != &o) {
            release();
            common_ = o.common_;
            symbolic_ = o.symbolic_;
            numeric_ = o.numeric_;
            n_ = o.n_;
            o.symbolic_ = nullptr;
            o.numeric_ = nullptr;
        }
        return *this;
    }
    ~SparseLu() { release(); }

    void analyze(const RealSparse& a) {
        release();
        n_ = static_cast<int>(a.rows());
        symbolic_ = klu_analyze(n_, const_cast<int*>(a.outerIndexPtr()), const_cast<int*>(a.innerIndexPtr()),
                                &common_);
    }

    /// Drops the pivot sequence so the next factorize() pivots afresh.
    void reset() {
        if (numeric_) klu_free_numeric(&numeric_, &common_);
    }

    /// False when the matrix is numerically singular.
    [[nodiscard]] bool factorize(const RealSparse& a) {
        if (!symbolic_) analyze(a);
        if (!symbolic_) return false;
        int* ap = const_cast<int*>(a.outerIndexPtr());
        int* ai = const_cast<int*>(a.innerIndexPtr());
        double* ax = const_cast<double*>(a.valuePtr());
        if (numeric_ && klu_refactor(ap, ai, ax, symbolic_, numeric_, &common_) &&
            klu_rcond(symbolic_, numeric_, &common_) && common_.rcond > reuse_rcond)
            return true;
        if (numeric_) klu_free_numeric(&numeric_, &common_);
        numeric_ = klu_factor(ap, ai, ax, symbolic_, &common_);
        return numeric_ != nullptr && common_.status == KLU_OK;
    }

    [[nodiscard]] Eigen::VectorXd solve(const Eigen::VectorXd& b) const {
        Eigen::VectorXd x = b;
        klu_solve(symbolic_, numeric_, n_, 1, x.data(), &common_);
        return x;
    }

private:
    static constexpr double reuse_rcond = 1e-12;

    void release() {
        if (numeric_) klu_free_numeric(&numeric_, &common_);
        if (symbolic_) klu_free_symbolic(&symbolic_, &common_);
    }

    mutable klu_common common_{};
    klu_symbolic* symbolic_ = nullptr;
    klu_numeric* numeric_ = nullptr;
    int n_ = 0;
};

#else

/// Sparse LU for repeated factorizations of one fixed pattern: analyze()
/// once, then factorize() per numeric update.
class SparseLu {
public:
    SparseLu() : impl_(std::make_unique<Impl>()) {}

    void analyze(const RealSparse& a) {
        impl_->analyzePattern(a);
        analyzed_ = true;
    }

    void reset() {}

    /// False when the matrix is numerically singular.
    [[nodiscard]] bool factorize(const RealSparse& a) {
        if (!analyzed_) analyze(a);
        impl_->factorize(a);
        return impl_->info() == Eigen::Success;
    }

    [[nodiscard]] Eigen::VectorXd solve(const Eigen::VectorXd& b) const { return impl_->solve(b); }

private:
    using Impl = Eigen::SparseLU<RealSparse, Eigen::COLAMDOrdering<int>>;
    std::unique_ptr<Impl> impl_;
    bool analyzed_ = false;
};

#endif

}  // namespace gridswitch
