#include "dauction/market.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "dauction/error.hpp"

namespace dauction {

namespace {

void require_finite(std::span<const double> values, const char* what) {
  for (double v : values) {
    if (!std::isfinite(v)) throw InvalidInput(std::string("non-finite ") + what);
  }
}

bool contains_sorted(const std::vector<std::size_t>& ids, std::size_t id) {
  return std::binary_search(ids.begin(), ids.end(), id);
}

void rank_buyers(std::span<const double> bids, std::vector<std::size_t>& order) {
  order.resize(bids.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return bids[a] > bids[b] || (bids[a] == bids[b] && a < b);
  });
}

void rank_sellers(std::span<const double> asks, std::vector<std::size_t>& order) {
  order.resize(asks.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return asks[a] < asks[b] || (asks[a] == asks[b] && a < b);
  });
}

}  // namespace

const char* to_string(Side side) { return side == Side::buyer ? "buyer" : "seller"; }

bool RoundOutcome::buyer_participates(std::size_t id) const {
  return contains_sorted(participating_buyers, id);
}

bool RoundOutcome::seller_participates(std::size_t id) const {
  return contains_sorted(participating_sellers, id);
}

bool ValuationProfile::is_optimal_buyer(std::size_t id) const {
  return contains_sorted(optimal_buyers, id);
}

bool ValuationProfile::is_optimal_seller(std::size_t id) const {
  return contains_sorted(optimal_sellers, id);
}

std::vector<double> ValuationProfile::sorted_buyer_values() const {
  std::vector<double> out;
  out.reserve(buyer_rank_order.size());
  for (std::size_t id : buyer_rank_order) out.push_back(buyer_values[id]);
  return out;
}

std::vector<double> ValuationProfile::sorted_seller_values() const {
  std::vector<double> out;
  out.reserve(seller_rank_order.size());
  for (std::size_t id : seller_rank_order) out.push_back(seller_values[id]);
  return out;
}

void Clearing::clear(std::span<const double> buyer_bids, std::span<const double> seller_bids,
                     RoundOutcome& out) {
  if (buyer_bids.empty() || seller_bids.empty()) {
    throw InvalidInput("clear_market needs at least one buyer and one seller");
  }
  require_finite(buyer_bids, "buyer bid");
  require_finite(seller_bids, "seller bid");

  rank_buyers(buyer_bids, buyer_order_);
  rank_sellers(seller_bids, seller_order_);

  const std::size_t depth = std::min(buyer_bids.size(), seller_bids.size());
  std::size_t k = 0;
  while (k < depth && buyer_bids[buyer_order_[k]] >= seller_bids[seller_order_[k]]) ++k;

  out.k = k;
  out.participating_buyers.assign(buyer_order_.begin(), buyer_order_.begin() + k);
  out.participating_sellers.assign(seller_order_.begin(), seller_order_.begin() + k);
  std::sort(out.participating_buyers.begin(), out.participating_buyers.end());
  std::sort(out.participating_sellers.begin(), out.participating_sellers.end());
  if (k == 0) {
    out.price.reset();
  } else {
    out.price = (buyer_bids[buyer_order_[k - 1]] + seller_bids[seller_order_[k - 1]]) / 2.0;
  }
  out.bids.buyer_bids.assign(buyer_bids.begin(), buyer_bids.end());
  out.bids.seller_bids.assign(seller_bids.begin(), seller_bids.end());
}

void Clearing::clear_fixed(std::span<const double> buyer_bids,
                           std::span<const double> seller_bids, double price,
                           RoundOutcome& out) {
  if (!std::isfinite(price)) throw InvalidInput("fixed price must be finite");
  require_finite(buyer_bids, "buyer bid");
  require_finite(seller_bids, "seller bid");

  out.participating_buyers.clear();
  out.participating_sellers.clear();
  for (std::size_t i = 0; i < buyer_bids.size(); ++i) {
    if (buyer_bids[i] >= price) out.participating_buyers.push_back(i);
  }
  for (std::size_t j = 0; j < seller_bids.size(); ++j) {
    if (seller_bids[j] <= price) out.participating_sellers.push_back(j);
  }
  out.k = out.participating_buyers.size();
  out.price = price;
  out.bids.buyer_bids.assign(buyer_bids.begin(), buyer_bids.end());
  out.bids.seller_bids.assign(seller_bids.begin(), seller_bids.end());
}

RoundOutcome clear_market(const BidProfile& bids) {
  RoundOutcome out;
  Clearing clearing;
  clearing.clear(bids.buyer_bids, bids.seller_bids, out);
  return out;
}

RoundOutcome clear_fixed_price(const BidProfile& bids, double price) {
  RoundOutcome out;
  Clearing clearing;
  clearing.clear_fixed(bids.buyer_bids, bids.seller_bids, price, out);
  return out;
}

ValuationProfile oracle_solution(std::vector<double> buyer_values,
                                 std::vector<double> seller_values) {
  ValuationProfile profile;
  profile.buyer_values = std::move(buyer_values);
  profile.seller_values = std::move(seller_values);

  RoundOutcome truth;
  Clearing clearing;
  clearing.clear(profile.buyer_values, profile.seller_values, truth);

  profile.k_star = truth.k;
  profile.p_star = truth.price;
  profile.optimal_buyers = std::move(truth.participating_buyers);
  profile.optimal_sellers = std::move(truth.participating_sellers);
  rank_buyers(profile.buyer_values, profile.buyer_rank_order);
  rank_sellers(profile.seller_values, profile.seller_rank_order);

  if (profile.p_star) {
    const double p = *profile.p_star;
    double gap = std::numeric_limits<double>::infinity();
    for (double b : profile.buyer_values) gap = std::min(gap, std::abs(b - p));
    for (double s : profile.seller_values) gap = std::min(gap, std::abs(p - s));
    profile.delta = gap;
  }
  return profile;
}

}  // namespace dauction
