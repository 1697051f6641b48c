//! Catalog of concrete mechanisms.

mod generalized;
mod linear_price;
mod one_seller;
mod posted;

pub use generalized::{
    FirstProfitable, GeneralizedPostedPrice, PostedOffer, SelectWith, SelectionRule,
};
pub use linear_price::{
    compute_order_stats, LinearPrice, LinearPriceParams, LinearPriceTrace, OrderStatistics,
    DEFAULT_FALLBACK_PRICE,
};
pub use one_seller::{LowerBidPrice, SpreadRebate, TieredPostedPrice};
pub use posted::{PairwisePostedPrices, PostedPrice};

use std::sync::Arc;

use crate::amount::Amount;
use crate::error::Result;
use crate::model::MarketShape;

pub fn make_bilateral_posted_price(price: Amount) -> Result<PostedPrice> {
    PostedPrice::new(price)
}

/// Two seller/buyer pairs, each with its own posted price.
pub fn make_example1(first: Amount, second: Amount) -> Result<PairwisePostedPrices> {
    PairwisePostedPrices::new(vec![first, second])
}

pub fn make_example2(seller_price: Amount, buyer_price: Amount) -> Result<SpreadRebate> {
    SpreadRebate::new(seller_price, buyer_price)
}

pub fn make_example3() -> LowerBidPrice {
    LowerBidPrice::new()
}

pub fn make_example4(primary: Amount, secondary: Amount) -> Result<TieredPostedPrice> {
    TieredPostedPrice::new(primary, secondary)
}

pub fn make_linear_price(params: LinearPriceParams) -> Result<LinearPrice> {
    LinearPrice::new(params)
}

/// One constant price per trader set; `selection` picks the active set.
pub fn make_generalized_posted_price(
    shape: MarketShape,
    offers: Vec<PostedOffer>,
    selection: Arc<dyn SelectionRule>,
) -> Result<GeneralizedPostedPrice> {
    GeneralizedPostedPrice::new(shape, offers, selection)
}
