use dauction::mechanisms::{compute_order_stats, make_example3, LinearPrice, LinearPriceParams};
use dauction::{dec, Amount, Mechanism, Outcome, Player, ValuationProfile};
use proptest::prelude::*;

/// Straight-line evaluation of the five steps, written without the library's
/// helpers.
fn oracle(p: &LinearPriceParams, s: &[Amount], b: &[Amount]) -> Outcome {
    let (m, n) = (s.len(), b.len());
    let mut ss: Vec<(Amount, usize)> = s.iter().copied().zip(0..).collect();
    ss.sort();
    let mut bs: Vec<(Amount, usize)> = b.iter().copied().zip(0..).collect();
    bs.sort_by(|x, y| y.0.cmp(&x.0).then(x.1.cmp(&y.1)));
    let s_at = |k: usize| if k == 0 { Amount::ZERO } else if k > m { Amount::ONE } else { ss[k - 1].0 };
    let b_at = |k: usize| if k == 0 { Amount::ONE } else if k > n { Amount::ZERO } else { bs[k - 1].0 };

    let mut kappa = 0;
    for k in 1..=m.min(n) {
        if s_at(k) <= b_at(k) {
            kappa = k;
        }
    }
    let price = if kappa == m && kappa == n {
        p.fallback_price
    } else {
        let mut total = Amount::ZERO;
        for l in 1..=m - kappa {
            total += p.seller_weights[l - 1] * s_at(kappa + l);
        }
        for l in 1..=n - kappa {
            total += p.buyer_weights[l - 1] * b_at(kappa + l);
        }
        total
    };
    let mut sellers: Vec<usize> = Vec::new();
    for &i in &p.seller_priority {
        if s[i] <= s_at(kappa) && s[i] < price {
            sellers.push(i);
        }
    }
    let mut buyers: Vec<usize> = Vec::new();
    for &j in &p.buyer_priority {
        if b[j] >= b_at(kappa) && b[j] > price {
            buyers.push(j);
        }
    }
    let volume = sellers.len().min(buyers.len());
    let mut out = Outcome {
        seller_trades: vec![false; m],
        buyer_trades: vec![false; n],
        receipts: vec![Amount::ZERO; m],
        payments: vec![Amount::ZERO; n],
    };
    for &i in &sellers[..volume] {
        out.seller_trades[i] = true;
        out.receipts[i] = price;
    }
    for &j in &buyers[..volume] {
        out.buyer_trades[j] = true;
        out.payments[j] = price;
    }
    out
}

fn valuation() -> impl Strategy<Value = Amount> {
    (0i128..=20).prop_map(|k| Amount::new(k, 20))
}

fn permutation(len: usize) -> impl Strategy<Value = Vec<usize>> {
    Just((0..len).collect::<Vec<_>>()).prop_shuffle()
}

/// Admissible parameters: weights `w / (3 (m + n))` with `w <= 3` sum to at
/// most one.
fn params(m: usize, n: usize) -> impl Strategy<Value = LinearPriceParams> {
    let denom = 3 * (m + n) as i128;
    let weights = move |len| prop::collection::vec((0i128..=3).prop_map(move |w| Amount::new(w, denom)), len);
    (weights(m), weights(n), permutation(m), permutation(n), valuation()).prop_map(
        |(c, d, sigma, beta, fallback)| {
            LinearPriceParams::new(c, d).with_priorities(sigma, beta).with_fallback(fallback)
        },
    )
}

fn case() -> impl Strategy<Value = (LinearPriceParams, ValuationProfile)> {
    (1usize..=4, 1usize..=4).prop_flat_map(|(m, n)| {
        let profile = (prop::collection::vec(valuation(), m), prop::collection::vec(valuation(), n))
            .prop_map(|(s, b)| ValuationProfile::new(s, b).unwrap());
        (params(m, n), profile)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn matches_straight_line_oracle((p, v) in case()) {
        let mech = LinearPrice::new(p.clone()).unwrap();
        prop_assert_eq!(mech.evaluate(&v).unwrap(), oracle(&p, v.sellers(), v.buyers()));
    }

    #[test]
    fn structural_invariants((p, v) in case()) {
        let mech = LinearPrice::new(p).unwrap();
        let out = mech.evaluate(&v).unwrap();
        prop_assert_eq!(&out, &mech.evaluate(&v).unwrap());
        let trace = mech.trace(&v).unwrap();
        prop_assert!(trace.price.is_unit());
        prop_assert_eq!(out.units_sold(), out.units_bought());
        prop_assert!(out.units_sold() <= trace.stats.kappa);
        prop_assert_eq!(out.total_receipts(), out.total_payments());

        // with BB the payoffs sum to the realized gains from trade
        let total: Amount = v.shape().iter_players().map(|k| out.payoff(&v, k)).sum();
        let gains: Amount = (0..v.shape().buyers)
            .filter(|&j| out.buyer_trades[j])
            .map(|j| v.buyer(j))
            .sum::<Amount>()
            - (0..v.shape().sellers).filter(|&i| out.seller_trades[i]).map(|i| v.seller(i)).sum();
        prop_assert_eq!(total, gains);
    }

    #[test]
    fn order_statistics_ignore_player_order(
        (_, v) in case(),
        rot_s in 0usize..4,
        rot_b in 0usize..4,
    ) {
        let mut s = v.sellers().to_vec();
        let mut b = v.buyers().to_vec();
        let (ls, lb) = (s.len(), b.len());
        s.rotate_left(rot_s % ls);
        b.reverse();
        b.rotate_left(rot_b % lb);
        let w = ValuationProfile::new(s, b).unwrap();
        let (a, z) = (compute_order_stats(&v), compute_order_stats(&w));
        prop_assert_eq!(a.kappa, z.kappa);
        prop_assert_eq!(a.sorted_seller_values(), z.sorted_seller_values());
        prop_assert_eq!(a.sorted_buyer_values(), z.sorted_buyer_values());
    }

    #[test]
    fn example3_trades_with_the_higher_buyer(
        s in valuation(),
        b1 in valuation(),
        b2 in valuation(),
    ) {
        let v = ValuationProfile::new(vec![s], vec![b1, b2]).unwrap();
        let out = make_example3().evaluate(&v).unwrap();
        if out.trades(Player::Buyer(0)) {
            prop_assert!(b1 >= b2);
        }
        if out.trades(Player::Buyer(1)) {
            prop_assert!(b2 > b1);
        }
        prop_assert_eq!(out.total_receipts(), out.total_payments());
    }
}

#[test]
fn oracle_agrees_on_the_worked_examples() {
    let p = LinearPriceParams::next_buyer(4, 4);
    let s = ["0.1", "0.3", "0.5", "0.7"].map(dec);
    let b = ["0.9", "0.8", "0.6", "0.4"].map(dec);
    let out = oracle(&p, &s, &b);
    assert_eq!(out.seller_trades, [true, true, false, false]);
    assert_eq!(out.buyer_trades, [true, true, false, false]);
    assert_eq!(out.receipts[0], dec("0.4"));

    let p = LinearPriceParams::next_buyer(2, 3);
    let out = oracle(&p, &["0.05", "0.5"].map(dec), &["0.7", "0.3", "0.1"].map(dec));
    assert_eq!(out.seller_trades, [true, false]);
    assert_eq!(out.buyer_trades, [true, false, false]);
    assert_eq!(out.payments[0], dec("0.3"));
}
