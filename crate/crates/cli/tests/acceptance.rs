//! Acceptance suite. Runs without the libtest harness so every criterion
//! prints its own pass/FAIL line; the process fails if any criterion does.

use std::collections::BTreeMap;
use std::fs;
use std::panic::{self, AssertUnwindSafe};
use std::process::Command;
use std::time::{Duration, Instant};

use dauction::mechanisms::{
    make_bilateral_posted_price, make_example1, make_example2, make_example3, make_example4,
    make_linear_price, GeneralizedPostedPrice, LinearPrice, LinearPriceParams, PostedOffer,
};
use dauction::search::{default_report_grid, mine_ic_failures};
use dauction::verify::{self, Check, Violation};
use dauction::{dec, Amount, Grid, MarketShape, Mechanism, Player, TraderSet, ValuationProfile};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn pts(xs: &[&str]) -> Vec<Amount> {
    xs.iter().map(|x| dec(x)).collect()
}

fn profile(s: &[&str], b: &[&str]) -> ValuationProfile {
    ValuationProfile::new(pts(s), pts(b)).unwrap()
}

fn evidence(w: &Violation) -> BTreeMap<&'static str, String> {
    w.evidence.fields().into_iter().collect()
}

fn within(limit: Duration, start: Instant, what: &str) {
    let took = start.elapsed();
    assert!(took < limit, "{what} took {took:?}, limit {limit:?}");
}

fn clean(mech: &dyn Mechanism, grid: &Grid, checks: &[Check]) {
    for c in checks {
        let found = c.run(mech, grid).unwrap();
        assert!(found.is_empty(), "{} {c}: {} violations, first {}", mech.name(), found.len(), found[0]);
    }
}

fn criterion_1() {
    let start = Instant::now();
    let m = make_linear_price(LinearPriceParams::next_buyer(4, 4)).unwrap();
    let v = profile(&["0.1", "0.3", "0.5", "0.7"], &["0.9", "0.8", "0.6", "0.4"]);
    let trace = m.trace(&v).unwrap();
    assert_eq!(trace.stats.kappa, 3);
    assert_eq!(trace.price, dec("0.4"));
    let out = m.evaluate(&v).unwrap();
    assert_eq!(out.trader_set(), TraderSet::new([0, 1], [0, 1]));
    for p in m.shape().iter_players() {
        let want = if out.trades(p) { dec("0.4") } else { Amount::ZERO };
        assert_eq!(out.transfer(p), want, "{p}");
    }
    within(Duration::from_secs(1), start, "evaluation");
}

fn criterion_2() {
    for price in ["0.25", "0.5", "0.75"] {
        let m = make_bilateral_posted_price(dec(price)).unwrap();
        let g = Grid::for_mechanism(&m, 11).unwrap();
        for p in m.shape().iter_players() {
            assert!(g.axis(p).len() <= 13, "axis has {} points", g.axis(p).len());
            assert!(g.axis(p).contains(&dec(price)));
        }
        let start = Instant::now();
        clean(&m, &g, &[Check::Ic, Check::Ir, Check::Bb, Check::Nw, Check::A1, Check::A2, Check::A3]);
        within(Duration::from_secs(1), start, "checks");
    }
}

fn criterion_3() {
    let m = make_example1(dec("0.3"), dec("0.6")).unwrap();
    let g = Grid::default_for(&m).unwrap();
    clean(&m, &g, &[Check::Ic, Check::Ir, Check::Bb, Check::Nw, Check::A2]);
    let found = verify::check_a1_common_price(&m, &g).unwrap();
    assert!(!found.is_empty());
    let both_pairs = found.iter().find(|w| {
        let out = m.evaluate(&w.profile).unwrap();
        let e = evidence(w);
        out.trader_set().len() == 4
            && e["first_transfer"] == "0.3"
            && e["second_transfer"] == "0.6"
    });
    let w = both_pairs.expect("no witness with both pairs trading at 0.3 and 0.6");
    assert!(w.replay(&m, &g).unwrap());
}

fn criterion_4() {
    let m = make_example2(dec("0.3"), dec("0.6")).unwrap();
    let g = Grid::default_for(&m).unwrap();
    clean(&m, &g, &[Check::Ic, Check::Ir, Check::Bb, Check::Nw, Check::A1]);
    let a2 = verify::check_a2_worst_type(&m, &g).unwrap();
    let w = a2
        .iter()
        .find(|w| w.player.is_some_and(|p| matches!(p, Player::Buyer(_)) && w.profile.get(p).is_zero()))
        .expect("no zero-valuation buyer witness");
    assert_eq!(evidence(w)["payoff"], "0.3");
    assert!(w.replay(&m, &g).unwrap());

    let p1 = verify::check_prop1_structure(&m, &g).unwrap();
    let two_prices = p1.iter().find(|w| {
        let e = evidence(w);
        e.get("first_transfer").map(String::as_str) == Some("0.3")
            && e.get("second_transfer").map(String::as_str) == Some("0.6")
    });
    assert!(two_prices.expect("two-price profile not flagged").replay(&m, &g).unwrap());
}

fn criterion_5() {
    let m = make_example3();
    let g = Grid::default_for(&m).unwrap();
    clean(&m, &g, &[Check::Ic, Check::Ir, Check::Bb, Check::Nw, Check::A1, Check::A2]);
    let a3 = verify::check_a3_nonbossy(&m, &g).unwrap();
    let w = a3
        .iter()
        .find(|w| {
            let e = evidence(w);
            w.profile == profile(&["0.3"], &["0.7", "0.4"])
                && w.player == Some(Player::Buyer(1))
                && w.deviation == Some(dec("0.5"))
                && e["affected"] == "buyer 1"
                && e["transfer_before"] == "0.4"
                && e["transfer_after"] == "0.5"
        })
        .expect("buyer-2 witness missing");
    assert!(w.replay(&m, &g).unwrap());

    let p2 = verify::check_prop2_structure(&m, &g).unwrap();
    let w = p2
        .iter()
        .find(|w| evidence(w)["traders"] == "sellers {1}, buyers {1}")
        .expect("trader set with two prices not flagged");
    assert!(w.replay(&m, &g).unwrap());
}

fn criterion_6() {
    let m = make_example4(dec("0.6"), dec("0.3")).unwrap();
    let g = Grid::default_for(&m).unwrap();
    clean(
        &m,
        &g,
        &[
            Check::Ic,
            Check::Ir,
            Check::Bb,
            Check::Nw,
            Check::A1,
            Check::A2,
            Check::A3,
            Check::Prop1,
            Check::Prop2,
        ],
    );

    let m = make_example4(dec("0.3"), dec("0.6")).unwrap();
    let g = Grid::default_for(&m).unwrap();
    let mined = mine_ic_failures(&m, &g, &default_report_grid(&g)).unwrap();
    let d = mined
        .iter()
        .find(|d| {
            matches!(d.player, Player::Seller(_))
                && d.profile.get(d.player) < dec("0.3")
                && d.report >= dec("0.3")
                && d.report < dec("0.6")
                && d.gain > Amount::ZERO
        })
        .expect("no seller deviation into [0.3, 0.6)");
    assert!(d.replay(&m).unwrap());
}

fn criterion_7() {
    // buyer 2 is served first when rationing among eligible buyers
    let params = LinearPriceParams::next_buyer(2, 3).with_priorities(vec![0, 1], vec![1, 0, 2]);
    let m = LinearPrice::new(params).unwrap();
    let g = Grid::same_points(m.shape(), &pts(&["0.05", "0.1", "0.3", "0.5", "0.7", "0.95"])).unwrap();
    let start = Instant::now();
    let found = verify::check_ic(&m, &g).unwrap();
    within(Duration::from_secs(10), start, "IC scan");
    let v = profile(&["0.05", "0.5"], &["0.7", "0.3", "0.1"]);
    let w = found
        .iter()
        .find(|w| w.profile == v && w.player == Some(Player::Buyer(1)) && w.deviation == Some(dec("0.95")))
        .expect("witness missing");
    let e = evidence(w);
    assert_eq!(e["gain"], "0.2");
    assert!(w.replay(&m, &g).unwrap());

    // independent re-evaluation of both profiles, step by step
    let lie = v.with(Player::Buyer(1), dec("0.95"));
    let stats = m.trace(&lie).unwrap();
    assert_eq!(stats.stats.kappa, 2);
    assert_eq!(stats.price, dec("0.1"));
    assert!(stats.traders.contains(Player::Buyer(1)));
    let truthful = m.evaluate(&v).unwrap().payoff(&v, Player::Buyer(1));
    let deviating = m.evaluate(&lie).unwrap().payoff(&v, Player::Buyer(1));
    assert_eq!(deviating - truthful, dec("0.2"));
}

fn criterion_8() {
    let mut params = LinearPriceParams::new(pts(&["0.5", "0", "0"]), pts(&["0", "0"]));
    params.seller_priority = vec![1, 0, 2];
    let m = LinearPrice::new(params).unwrap();
    let seller_axis = pts(&["0", "0.01", "0.05", "0.2", "0.9", "1"]);
    let buyer_axis = pts(&["0", "0.1", "0.95", "1"]);
    let g = Grid::new(vec![seller_axis; 3], vec![buyer_axis; 2]).unwrap();
    let mined = mine_ic_failures(&m, &g, &default_report_grid(&g)).unwrap();
    let c1 = dec("0.5");
    let ordered = |v: &ValuationProfile| {
        let t = m.trace(v).unwrap();
        let k = t.stats.kappa;
        k + 2 <= 3
            && t.stats.seller(k) < t.stats.buyer(k + 1)
            && t.stats.buyer(k + 1) < t.stats.seller(k + 1)
            && t.stats.seller(k + 1) < c1 * t.stats.seller(k + 2)
    };
    let hits: Vec<_> = mined
        .iter()
        .filter(|d| matches!(d.player, Player::Seller(_)) && ordered(&d.profile))
        .collect();
    assert!(!hits.is_empty(), "no seller deviation at an ordered profile");
    for d in hits {
        assert!(d.gain > Amount::ZERO);
        assert!(d.replay(&m).unwrap());
    }
}

fn random_gpp(rng: &mut ChaCha8Rng) -> GeneralizedPostedPrice {
    let shape = MarketShape::new(rng.random_range(1..=2), rng.random_range(1..=2)).unwrap();
    let mut offers: Vec<PostedOffer> = Vec::new();
    for _ in 0..rng.random_range(1..=4) {
        let k = rng.random_range(1..=shape.sellers.min(shape.buyers));
        let mut s: Vec<usize> = (0..shape.sellers).collect();
        let mut b: Vec<usize> = (0..shape.buyers).collect();
        s.shuffle(rng);
        b.shuffle(rng);
        let t = TraderSet::new(s[..k].iter().copied(), b[..k].iter().copied());
        if offers.iter().all(|o| o.traders != t) {
            offers.push(PostedOffer::new(t, Amount::new(rng.random_range(1..=9), 10)));
        }
    }
    GeneralizedPostedPrice::first_profitable(shape, offers).unwrap()
}

fn is_clean(mech: &dyn Mechanism, grid: &Grid, checks: &[Check]) -> bool {
    checks.iter().all(|c| c.run(mech, grid).unwrap().is_empty())
}

fn criterion_9() {
    let mut mechs: Vec<Box<dyn Mechanism>> = vec![
        Box::new(make_bilateral_posted_price(dec("0.25")).unwrap()),
        Box::new(make_bilateral_posted_price(dec("0.5")).unwrap()),
        Box::new(make_bilateral_posted_price(dec("0.75")).unwrap()),
        Box::new(make_example1(dec("0.3"), dec("0.6")).unwrap()),
        Box::new(make_example2(dec("0.3"), dec("0.6")).unwrap()),
        Box::new(make_example3()),
        Box::new(make_example4(dec("0.6"), dec("0.3")).unwrap()),
        Box::new(make_example4(dec("0.3"), dec("0.6")).unwrap()),
        Box::new(make_linear_price(LinearPriceParams::next_buyer(2, 2)).unwrap()),
        Box::new(
            make_linear_price(LinearPriceParams::next_buyer(2, 3).with_priorities(vec![0, 1], vec![1, 0, 2]))
                .unwrap(),
        ),
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    mechs.extend((0..24).map(|_| Box::new(random_gpp(&mut rng)) as Box<dyn Mechanism>));

    let robust = [Check::Ic, Check::Ir, Check::Bb, Check::Nw, Check::A1, Check::A2];
    let (mut fired_a, mut fired_b, mut fired_c) = (0, 0, 0);
    for mech in &mechs {
        let mech = mech.as_ref();
        let points: &[usize] = match mech.shape().players() {
            0..=2 => &[6, 11],
            3 => &[5, 7],
            _ => &[4, 5],
        };
        for &n in points {
            let g = Grid::for_mechanism(mech, n).unwrap();
            let tag = format!("{} on {n} points", mech.name());
            if is_clean(mech, &g, &[Check::Ic]) {
                fired_a += 1;
                assert!(verify::check_lemma1_monotone(mech, &g).unwrap().is_empty(), "(a) {tag}");
            }
            if is_clean(mech, &g, &robust) {
                fired_b += 1;
                assert!(verify::check_prop1_structure(mech, &g).unwrap().is_empty(), "(b) {tag}");
                if is_clean(mech, &g, &[Check::A3]) {
                    fired_c += 1;
                    assert!(verify::check_prop2_structure(mech, &g).unwrap().is_empty(), "(c) {tag}");
                }
            }
        }
    }
    assert!(fired_a > 0 && fired_b > 0 && fired_c > 0, "premises held {fired_a}/{fired_b}/{fired_c} times");
}

fn criterion_10() {
    let dir = tempfile::TempDir::new().unwrap();
    let configs = [
        ("example3.toml", "kind = \"example3\"\n"),
        (
            "linear.toml",
            "kind = \"linear_price\"\nc = [\"0\", \"0\"]\nd = [\"1\", \"0\", \"0\"]\nbeta = [2, 1, 3]\n",
        ),
    ];
    for (name, text) in configs {
        let cfg = dir.path().join(name);
        fs::write(&cfg, text).unwrap();
        let mut reports = Vec::new();
        for jobs in ["1", "8"] {
            let out = dir.path().join(format!("{name}.{jobs}.json"));
            let status = Command::new(env!("CARGO_BIN_EXE_dauction"))
                .args(["--jobs", jobs, "check", "--grid", "6", "--mechanism"])
                .arg(&cfg)
                .arg("--out")
                .arg(&out)
                .status()
                .unwrap();
            assert_eq!(status.code(), Some(1), "{name} with --jobs {jobs}");
            reports.push(fs::read(&out).unwrap());
        }
        assert!(!reports[0].is_empty());
        assert!(reports[0] == reports[1], "{name}: reports differ between --jobs 1 and --jobs 8");
    }
}

fn main() {
    let criteria: [(u32, fn()); 10] = [
        (1, criterion_1),
        (2, criterion_2),
        (3, criterion_3),
        (4, criterion_4),
        (5, criterion_5),
        (6, criterion_6),
        (7, criterion_7),
        (8, criterion_8),
        (9, criterion_9),
        (10, criterion_10),
    ];
    panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (n, run) in criteria {
        let start = Instant::now();
        let result = panic::catch_unwind(AssertUnwindSafe(run));
        let took = start.elapsed().as_secs_f64();
        match result {
            Ok(()) => println!("criterion {n}: pass ({took:.2}s)"),
            Err(e) => {
                failed += 1;
                let msg = e
                    .downcast_ref::<String>()
                    .cloned()
                    .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                    .unwrap_or_default();
                println!("criterion {n}: FAIL ({took:.2}s) {msg}");
            }
        }
    }
    println!("{} of {} criteria pass", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
