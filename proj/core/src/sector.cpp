#include "manylaser/sector.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/Eigenvalues>

#include "manylaser/errors.hpp"

namespace manylaser {

namespace {

using Triplet = Eigen::Triplet<cplx, int>;

// Restriction of a global operator to rows in `rows` and columns in `cols`.
SparseMat restrict(const SparseMat& m, const std::vector<std::size_t>& rows, const std::vector<std::size_t>& cols,
                   const std::vector<int>& slot, const std::vector<int>& sector_of, int row_sector) {
  std::vector<Triplet> t;
  for (std::size_t c = 0; c < cols.size(); ++c) {
    for (SparseMat::InnerIterator it(m, static_cast<int>(cols[c])); it; ++it) {
      const auto r = static_cast<std::size_t>(it.row());
      if (sector_of[r] != row_sector) continue;
      t.emplace_back(slot[r], static_cast<int>(c), it.value());
    }
  }
  SparseMat out(static_cast<int>(rows.size()), static_cast<int>(cols.size()));
  out.setFromTriplets(t.begin(), t.end());
  out.makeCompressed();
  return out;
}

using BlockMap = Eigen::Map<DenseMat>;
using ConstBlockMap = Eigen::Map<const DenseMat>;

ConstBlockMap block_of(const DenseVec& x, const LadderSector& s) {
  const auto d = static_cast<Eigen::Index>(s.size());
  return ConstBlockMap(x.data() + s.offset, d, d);
}

BlockMap block_of(DenseVec& x, const LadderSector& s) {
  const auto d = static_cast<Eigen::Index>(s.size());
  return BlockMap(x.data() + s.offset, d, d);
}

}  // namespace

SectorLiouvillian::SectorLiouvillian(SystemParams params, SpaceDescriptor desc, std::vector<LadderSector> sectors)
    : params_(std::move(params)), desc_(desc), sectors_(std::move(sectors)) {
  sector_of_state_.assign(desc_.dim(), -1);
  slot_of_state_.assign(desc_.dim(), -1);
  std::size_t offset = 0;
  for (std::size_t n = 0; n < sectors_.size(); ++n) {
    auto& s = sectors_[n];
    s.offset = offset;
    offset += s.block_len();
    for (std::size_t k = 0; k < s.states.size(); ++k) {
      sector_of_state_[s.states[k]] = static_cast<int>(n);
      slot_of_state_[s.states[k]] = static_cast<int>(k);
    }
  }
  dim_ = offset;
}

SectorLiouvillian build_sector_liouvillian(const SystemParams& params) {
  const SpaceDescriptor desc = params.space();
  const int top = desc.num_spins() + desc.fock_dim() - 1;

  std::vector<std::vector<std::size_t>> members(static_cast<std::size_t>(top) + 1);
  std::vector<int> sector_of(desc.dim()), slot(desc.dim());
  for (std::size_t i = 0; i < desc.dim(); ++i) {
    const int n = desc.excitations(i);
    sector_of[i] = n;
    slot[i] = static_cast<int>(members[static_cast<std::size_t>(n)].size());
    members[static_cast<std::size_t>(n)].push_back(i);
  }

  const cplx I{0.0, 1.0};
  const SparseMat h = build_hamiltonian(params, desc).matrix();
  const auto jumps = collapse_operators(params, desc);
  SparseMat gamma(static_cast<int>(desc.dim()), static_cast<int>(desc.dim()));
  for (const auto& c : jumps) gamma += SparseMat(c.op.matrix().adjoint() * c.op.matrix());
  const SparseMat drift = -I * h - 0.5 * gamma;

  std::vector<LadderSector> sectors(members.size());
  for (std::size_t n = 0; n < members.size(); ++n) {
    auto& s = sectors[n];
    s.excitations = static_cast<int>(n);
    s.states = members[n];
    s.drift = DenseMat(restrict(drift, s.states, s.states, slot, sector_of, static_cast<int>(n)));
    if (n > 0) {
      for (const auto& c : jumps) {
        if (c.channel != CollapseOperator::Channel::Pump) continue;
        s.pump_in.push_back(restrict(c.op.matrix(), s.states, members[n - 1], slot, sector_of, static_cast<int>(n)));
      }
    }
    if (n + 1 < members.size()) {
      for (const auto& c : jumps) {
        if (c.channel != CollapseOperator::Channel::Loss) continue;
        s.loss_in = restrict(c.op.matrix(), s.states, members[n + 1], slot, sector_of, static_cast<int>(n));
      }
    }
  }
  return SectorLiouvillian(params.with_n_max(desc.fock_dim()), desc, std::move(sectors));
}

void SectorLiouvillian::apply(const DenseVec& x, DenseVec& y) const {
  if (static_cast<std::size_t>(x.size()) != dim_) throw DomainError("SectorLiouvillian::apply: size mismatch");
  y.resize(static_cast<Eigen::Index>(dim_));
  for (std::size_t n = 0; n < sectors_.size(); ++n) {
    const auto& s = sectors_[n];
    if (s.size() == 0) continue;
    auto out = block_of(y, s);
    const auto xn = block_of(x, s);
    out.noalias() = s.drift * xn;
    out.noalias() += xn * s.drift.adjoint();
    if (n > 0 && sectors_[n - 1].size() > 0) {
      const auto lower = block_of(x, sectors_[n - 1]);
      for (const auto& p : s.pump_in) {
        const DenseMat t = p * lower;
        out.noalias() += t * p.adjoint();
      }
    }
    if (n + 1 < sectors_.size() && sectors_[n + 1].size() > 0 && s.loss_in.nonZeros() > 0) {
      const auto upper = block_of(x, sectors_[n + 1]);
      const DenseMat t = s.loss_in * upper;
      out.noalias() += t * s.loss_in.adjoint();
    }
  }
}

DenseVec SectorLiouvillian::apply(const DenseVec& x) const {
  DenseVec y;
  apply(x, y);
  return y;
}

SparseMat SectorLiouvillian::assemble() const {
  std::vector<Triplet> t;
  for (std::size_t n = 0; n < sectors_.size(); ++n) {
    const auto& s = sectors_[n];
    const int d = static_cast<int>(s.size());
    const int base = static_cast<int>(s.offset);
    // I (x) A + conj(A) (x) I
    for (int c = 0; c < d; ++c) {
      for (int r = 0; r < d; ++r) {
        for (int rp = 0; rp < d; ++rp) {
          const cplx a = s.drift(rp, r);
          if (a != cplx{0.0, 0.0}) t.emplace_back(base + c * d + rp, base + c * d + r, a);
        }
        for (int cp = 0; cp < d; ++cp) {
          const cplx a = std::conj(s.drift(cp, c));
          if (a != cplx{0.0, 0.0}) t.emplace_back(base + cp * d + r, base + c * d + r, a);
        }
      }
    }
    auto add_jump = [&](const SparseMat& op, const LadderSector& from) {
      const int df = static_cast<int>(from.size());
      const int fbase = static_cast<int>(from.offset);
      for (int c = 0; c < op.outerSize(); ++c)
        for (SparseMat::InnerIterator ic(op, c); ic; ++ic)
          for (int r = 0; r < op.outerSize(); ++r)
            for (SparseMat::InnerIterator ir(op, r); ir; ++ir)
              t.emplace_back(base + static_cast<int>(ic.row()) * d + static_cast<int>(ir.row()),
                             fbase + c * df + r, std::conj(ic.value()) * ir.value());
    };
    if (n > 0)
      for (const auto& p : s.pump_in) add_jump(p, sectors_[n - 1]);
    if (n + 1 < sectors_.size() && s.loss_in.nonZeros() > 0) add_jump(s.loss_in, sectors_[n + 1]);
  }
  SparseMat m(static_cast<int>(dim_), static_cast<int>(dim_));
  m.setFromTriplets(t.begin(), t.end());
  m.prune(kDropTolerance, 1.0);
  m.makeCompressed();
  return m;
}

double SectorLiouvillian::max_abs_entry() const {
  double worst = 0.0;
  for (const auto& s : sectors_) {
    const auto d = static_cast<Eigen::Index>(s.size());
    for (Eigen::Index c = 0; c < d; ++c)
      for (Eigen::Index r = 0; r < d; ++r) {
        if (r != c) worst = std::max(worst, std::abs(s.drift(r, c)));
        worst = std::max(worst, std::abs(s.drift(r, r) + std::conj(s.drift(c, c))));
      }
    for (const auto& p : s.pump_in)
      if (p.nonZeros() > 0) worst = std::max(worst, std::pow(p.coeffs().cwiseAbs().maxCoeff(), 2));
    if (s.loss_in.nonZeros() > 0) worst = std::max(worst, std::pow(s.loss_in.coeffs().cwiseAbs().maxCoeff(), 2));
  }
  return worst;
}

long SectorLiouvillian::position(std::size_t row, std::size_t col) const {
  if (row >= desc_.dim() || col >= desc_.dim()) return -1;
  const int sr = sector_of_state_[row];
  if (sr < 0 || sr != sector_of_state_[col]) return -1;
  const auto& s = sectors_[static_cast<std::size_t>(sr)];
  return static_cast<long>(s.offset + static_cast<std::size_t>(slot_of_state_[col]) * s.size() +
                           static_cast<std::size_t>(slot_of_state_[row]));
}

cplx SectorLiouvillian::trace(const DenseVec& x) const {
  cplx t{0.0, 0.0};
  for (const auto& s : sectors_)
    if (s.size() > 0) t += block_of(x, s).trace();
  return t;
}

DensityMatrix SectorLiouvillian::to_density(const DenseVec& x) const {
  std::vector<DensityBlock> blocks;
  blocks.reserve(sectors_.size());
  for (const auto& s : sectors_) {
    if (s.size() == 0) continue;
    blocks.push_back({s.states, DenseMat(block_of(x, s))});
  }
  return DensityMatrix(desc_, std::move(blocks));
}

DenseVec SectorLiouvillian::from_density(const DensityMatrix& rho) const {
  if (!(rho.desc() == desc_)) throw DomainError("SectorLiouvillian::from_density: descriptor mismatch");
  DenseVec x = DenseVec::Zero(static_cast<Eigen::Index>(dim_));
  for (const auto& s : sectors_) {
    auto b = block_of(x, s);
    for (std::size_t c = 0; c < s.size(); ++c)
      for (std::size_t r = 0; r < s.size(); ++r)
        b(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rho.coeff(s.states[r], s.states[c]);
  }
  return x;
}

double SectorLiouvillian::estimated_factor_entries() const {
  double total = 0.0;
  for (std::size_t n = 0; n < sectors_.size(); ++n) {
    const double b = static_cast<double>(sectors_[n].block_len());
    total += b * b;
    if (n + 1 < sectors_.size()) total += 2.0 * b * static_cast<double>(sectors_[n + 1].block_len());
  }
  return total;
}

LadderPreconditioner::LadderPreconditioner(const SectorLiouvillian& liou) : liou_(&liou) {
  factors_.resize(liou.sectors().size());
  for (std::size_t n = 0; n < factors_.size(); ++n) {
    const auto& s = liou.sectors()[n];
    if (s.size() == 0) continue;
    Eigen::ComplexEigenSolver<DenseMat> es(s.drift, true);
    const Eigen::VectorXcd lam = es.eigenvalues();
    auto& f = factors_[n];
    f.vecs = es.eigenvectors();
    f.inv_vecs = f.vecs.inverse();
    f.vecs_adj = f.vecs.adjoint();
    f.inv_vecs_adj = f.inv_vecs.adjoint();
    const double scale = 1.0 + lam.cwiseAbs().maxCoeff();
    const auto d = lam.size();
    f.inv_denominator.resize(d, d);
    for (Eigen::Index j = 0; j < d; ++j)
      for (Eigen::Index i = 0; i < d; ++i) {
        cplx den = lam(i) + std::conj(lam(j));
        // A purely dissipation-free mode makes the block singular; any
        // nonzero stand-in keeps the sweep usable.
        if (std::abs(den) < 1e-12 * scale) den = cplx{-1.0, 0.0};
        f.inv_denominator(i, j) = 1.0 / den;
      }
  }
}

void LadderPreconditioner::sylvester(std::size_t n, const cplx* rhs, cplx* out) const {
  const auto& f = factors_[n];
  const auto d = f.vecs.rows();
  Eigen::Map<const DenseMat> c(rhs, d, d);
  Eigen::Map<DenseMat> x(out, d, d);
  DenseMat t = f.inv_vecs * c * f.inv_vecs_adj;
  t = t.cwiseProduct(f.inv_denominator);
  x.noalias() = f.vecs * t * f.vecs_adj;
}

void LadderPreconditioner::add_pump(std::size_t n, const cplx* lower, cplx* out, double sign) const {
  const auto& sectors = liou_->sectors();
  const auto& s = sectors[n];
  const auto d = static_cast<Eigen::Index>(s.size());
  const auto dl = static_cast<Eigen::Index>(sectors[n - 1].size());
  Eigen::Map<const DenseMat> xl(lower, dl, dl);
  Eigen::Map<DenseMat> y(out, d, d);
  for (const auto& p : s.pump_in) {
    const DenseMat t = p * xl;
    y.noalias() += sign * (t * p.adjoint());
  }
}

void LadderPreconditioner::add_loss(std::size_t n, const cplx* upper, cplx* out, double sign) const {
  const auto& sectors = liou_->sectors();
  const auto& s = sectors[n];
  const auto d = static_cast<Eigen::Index>(s.size());
  const auto du = static_cast<Eigen::Index>(sectors[n + 1].size());
  Eigen::Map<const DenseMat> xu(upper, du, du);
  Eigen::Map<DenseMat> y(out, d, d);
  const DenseMat t = s.loss_in * xu;
  y.noalias() += sign * (t * s.loss_in.adjoint());
}

DenseVec LadderPreconditioner::apply(const DenseVec& v) const {
  const auto& sectors = liou_->sectors();
  const std::size_t count = sectors.size();
  DenseVec y(v.size());
  DenseVec work;
  // forward sweep: (D + pump) y = v
  for (std::size_t n = 0; n < count; ++n) {
    const auto& s = sectors[n];
    if (s.size() == 0) continue;
    work = v.segment(static_cast<Eigen::Index>(s.offset), static_cast<Eigen::Index>(s.block_len()));
    if (n > 0 && sectors[n - 1].size() > 0 && !s.pump_in.empty())
      add_pump(n, y.data() + sectors[n - 1].offset, work.data(), -1.0);
    sylvester(n, work.data(), y.data() + s.offset);
  }
  // backward sweep: (D + loss) z = D y
  DenseVec z = y;
  for (std::size_t n = count; n-- > 0;) {
    const auto& s = sectors[n];
    if (s.size() == 0 || n + 1 >= count || sectors[n + 1].size() == 0 || s.loss_in.nonZeros() == 0) continue;
    work = DenseVec::Zero(static_cast<Eigen::Index>(s.block_len()));
    add_loss(n, z.data() + sectors[n + 1].offset, work.data(), 1.0);
    DenseVec corr(work.size());
    sylvester(n, work.data(), corr.data());
    z.segment(static_cast<Eigen::Index>(s.offset), corr.size()) -= corr;
  }
  return z;
}

}  // namespace manylaser
