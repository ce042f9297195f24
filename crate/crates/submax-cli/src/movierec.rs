//! MovieLens ingestion and the distributionally robust movie-recommendation
//! instance: sampled user rating rows become the scenarios of a Wasserstein
//! ball, the coupling is the multilinear extension of the per-user coverage
//! utility `f(S, ζ) = max_{j∈S} ζ_j`.

use std::collections::HashMap;
use std::fs;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use submax::dro::{
    CoverageMultilinearCoupling, DroConstants, DroInstance, EvalMode, SampleBox,
};
use submax::multilinear::EXACT_ENUMERATION_CAP;
use submax::region::FeasibleRegion;
use submax::vector::Vector;
use submax::Region64;

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("line {line}: expected 4 '::'-separated fields, got {got}")]
    FieldCount { line: usize, got: usize },
    #[error("line {line}: unparsable {field}: {text}")]
    BadNumber {
        line: usize,
        field: &'static str,
        text: String,
    },
    #[error("line {line}: rating {rating} outside [1, 5]")]
    RatingRange { line: usize, rating: f64 },
    #[error("{0}")]
    Build(String),
}

/// Parsed ratings with users and movies densely re-indexed in encounter
/// order; original identifiers are retained for reporting.
#[derive(Debug, Clone, Default)]
pub struct RatingsData {
    pub user_ids: Vec<u64>,
    pub movie_ids: Vec<u64>,
    /// `(dense user, dense movie, rating)`.
    pub triples: Vec<(usize, usize, f64)>,
}

impl RatingsData {
    pub fn n_users(&self) -> usize {
        self.user_ids.len()
    }
    pub fn n_movies(&self) -> usize {
        self.movie_ids.len()
    }
}

/// Parses a `ratings.dat`-style file of `UserID::MovieID::Rating::Timestamp`
/// lines. Non-UTF-8 bytes are tolerated (lossy Latin-1-style decoding);
/// malformed lines are reported with their 1-based line number.
pub fn parse_movielens(path: &Path) -> Result<RatingsData, IngestError> {
    let bytes = fs::read(path).map_err(|source| IngestError::Io {
        path: path.display().to_string(),
        source,
    })?;
    let text = String::from_utf8_lossy(&bytes);
    parse_movielens_str(&text)
}

pub fn parse_movielens_str(text: &str) -> Result<RatingsData, IngestError> {
    let mut data = RatingsData::default();
    let mut user_index: HashMap<u64, usize> = HashMap::new();
    let mut movie_index: HashMap<u64, usize> = HashMap::new();

    for (i, line) in text.lines().enumerate() {
        let line_no = i + 1;
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split("::").collect();
        if fields.len() != 4 {
            return Err(IngestError::FieldCount {
                line: line_no,
                got: fields.len(),
            });
        }
        let user: u64 = fields[0].trim().parse().map_err(|_| IngestError::BadNumber {
            line: line_no,
            field: "UserID",
            text: fields[0].into(),
        })?;
        let movie: u64 = fields[1].trim().parse().map_err(|_| IngestError::BadNumber {
            line: line_no,
            field: "MovieID",
            text: fields[1].into(),
        })?;
        let rating: f64 = fields[2].trim().parse().map_err(|_| IngestError::BadNumber {
            line: line_no,
            field: "Rating",
            text: fields[2].into(),
        })?;
        if !(1.0..=5.0).contains(&rating) {
            return Err(IngestError::RatingRange {
                line: line_no,
                rating,
            });
        }
        let u = *user_index.entry(user).or_insert_with(|| {
            data.user_ids.push(user);
            data.user_ids.len() - 1
        });
        let m = *movie_index.entry(movie).or_insert_with(|| {
            data.movie_ids.push(movie);
            data.movie_ids.len() - 1
        });
        data.triples.push((u, m, rating));
    }
    Ok(data)
}

/// Synthetic stand-in for the real dataset: every user rates every movie
/// with a continuous value in `[1, 5]`. Continuous ratings keep scenario
/// coordinates distinct, which the inner solver's certificates benefit from.
pub fn synthetic_ratings(n_users: usize, n_movies: usize, seed: u64) -> RatingsData {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut data = RatingsData {
        user_ids: (0..n_users as u64).collect(),
        movie_ids: (0..n_movies as u64).collect(),
        triples: Vec::with_capacity(n_users * n_movies),
    };
    for u in 0..n_users {
        for m in 0..n_movies {
            data.triples.push((u, m, 1.0 + 4.0 * rng.gen::<f64>()));
        }
    }
    data
}

/// A desk-scale distributionally robust movie-recommendation instance.
pub struct MovieRecInstance {
    pub dro: DroInstance<f64>,
    /// Number of movies to pick (the region's budget).
    pub budget: usize,
    /// Dense indices of the retained movies in the source data.
    pub kept_movies: Vec<usize>,
    pub sampled_users: Vec<usize>,
}

impl MovieRecInstance {
    /// `{0 ≤ x ≤ 1, Σ x = budget}` over the retained movies.
    pub fn region(&self) -> Region64 {
        FeasibleRegion::capped_simplex(self.kept_movies.len(), 1.0, self.budget as f64, true)
            .expect("budget <= m")
    }
}

/// Builds the instance: samples `n` users uniformly without replacement,
/// keeps the `m_cap` most-rated movies, imputes missing ratings at the scale
/// floor 1 (so coverage values stay in `[1, 5]` and the declared constants
/// remain valid), and wires the coverage coupling with uniform weights.
///
/// Grounds of `m ≤ 20` evaluate the multilinear extension exactly; larger
/// grounds use seeded sampling with the given batch size.
#[allow(clippy::too_many_arguments)]
pub fn build_movierec_dro(
    ratings: &RatingsData,
    n: usize,
    theta: f64,
    eps: f64,
    seed: u64,
    m_cap: usize,
    budget: usize,
    sample_batch: usize,
) -> Result<MovieRecInstance, IngestError> {
    if n == 0 || n > ratings.n_users() {
        return Err(IngestError::Build(format!(
            "cannot sample {n} users from {}",
            ratings.n_users()
        )));
    }
    if m_cap == 0 {
        return Err(IngestError::Build("m_cap must be positive".into()));
    }

    // most-rated movies, ties toward the lower dense index
    let mut counts = vec![0usize; ratings.n_movies()];
    for &(_, m, _) in &ratings.triples {
        counts[m] += 1;
    }
    let mut order: Vec<usize> = (0..ratings.n_movies()).collect();
    order.sort_by(|&a, &b| counts[b].cmp(&counts[a]).then(a.cmp(&b)));
    let kept_movies: Vec<usize> = order.into_iter().take(m_cap).collect();
    let m = kept_movies.len();
    if budget == 0 || budget > m {
        return Err(IngestError::Build(format!(
            "budget {budget} infeasible for {m} movies"
        )));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut users: Vec<usize> = (0..ratings.n_users()).collect();
    users.shuffle(&mut rng);
    let sampled_users: Vec<usize> = users.into_iter().take(n).collect();

    // rating matrix over (sampled users) x (kept movies), missing -> 1.0
    let mut matrix = vec![vec![1.0f64; m]; n];
    let movie_slot: HashMap<usize, usize> = kept_movies
        .iter()
        .enumerate()
        .map(|(slot, &dense)| (dense, slot))
        .collect();
    let user_slot: HashMap<usize, usize> = sampled_users
        .iter()
        .enumerate()
        .map(|(slot, &dense)| (dense, slot))
        .collect();
    for &(u, mv, r) in &ratings.triples {
        if let (Some(&us), Some(&ms)) = (user_slot.get(&u), movie_slot.get(&mv)) {
            matrix[us][ms] = r;
        }
    }

    let samples: Vec<Vector<f64>> = matrix.into_iter().map(Vector::from_raw).collect();
    let weights = vec![1.0 / n as f64; n];
    let mode = if m <= EXACT_ENUMERATION_CAP {
        EvalMode::Exact
    } else {
        EvalMode::Sampled {
            batch: sample_batch,
            seed: seed ^ 0x6d6f7669,
        }
    };
    let coupling = CoverageMultilinearCoupling::new(m, mode);
    // ratings in [1, 5]: L1 = λ1 = L2 = 5, λ2 = 2 L2 = 10
    let constants = DroConstants {
        l1: 5.0,
        lambda1: 5.0,
        lambda2: 10.0,
        l2: 5.0,
    };
    let dro = DroInstance::new(
        samples,
        weights,
        theta,
        SampleBox::uniform(m, 1.0, 5.0).map_err(|e| IngestError::Build(e.to_string()))?,
        Box::new(coupling),
        constants,
        eps,
    )
    .map_err(|e| IngestError::Build(e.to_string()))?;

    Ok(MovieRecInstance {
        dro,
        budget,
        kept_movies,
        sampled_users,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_well_formed_lines() {
        let data = parse_movielens_str("1::1193::5::978300760\n1::661::3::978302109\n2::1193::4::978298413\n").unwrap();
        assert_eq!(data.n_users(), 2);
        assert_eq!(data.n_movies(), 2);
        assert_eq!(data.triples[0], (0, 0, 5.0));
        assert_eq!(data.triples[2], (1, 0, 4.0));
        assert_eq!(data.user_ids, vec![1, 2]);
        assert_eq!(data.movie_ids, vec![1193, 661]);
    }

    #[test]
    fn empty_file_is_empty_data() {
        let data = parse_movielens_str("").unwrap();
        assert_eq!(data.n_users(), 0);
        assert!(data.triples.is_empty());
    }

    #[test]
    fn malformed_lines_name_the_line() {
        let err = parse_movielens_str("1::2::3::4\n1::2::3\n").unwrap_err();
        match err {
            IngestError::FieldCount { line, got } => {
                assert_eq!(line, 2);
                assert_eq!(got, 3);
            }
            other => panic!("unexpected error {other}"),
        }
        let err = parse_movielens_str("1::2::9::4\n").unwrap_err();
        assert!(matches!(err, IngestError::RatingRange { line: 1, .. }));
        let err = parse_movielens_str("x::2::3::4\n").unwrap_err();
        assert!(matches!(
            err,
            IngestError::BadNumber {
                line: 1,
                field: "UserID",
                ..
            }
        ));
    }

    #[test]
    fn builds_desk_instance() {
        let ratings = synthetic_ratings(6, 10, 3);
        let inst = build_movierec_dro(&ratings, 3, 0.2, 0.01, 7, 8, 2, 10).unwrap();
        assert_eq!(inst.dro.n_samples(), 3);
        assert_eq!(inst.dro.dim_x(), 8);
        assert_eq!(inst.budget, 2);
        let region = inst.region();
        assert_eq!(region.dim(), 8);
        // uniform weights sum to one within instance tolerance
        let total: f64 = inst.dro.weights().iter().sum();
        assert!((total - 1.0).abs() < 1e-12);
    }

    #[test]
    fn degenerate_single_scenario() {
        let ratings = synthetic_ratings(1, 5, 4);
        let inst = build_movierec_dro(&ratings, 1, 0.2, 0.01, 7, 5, 1, 10).unwrap();
        assert_eq!(inst.dro.n_samples(), 1);
        assert_eq!(inst.dro.weights(), &[1.0]);
    }

    #[test]
    fn sampling_too_many_users_fails() {
        let ratings = synthetic_ratings(2, 5, 4);
        assert!(build_movierec_dro(&ratings, 3, 0.2, 0.01, 7, 5, 1, 10).is_err());
    }
}
