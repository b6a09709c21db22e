//! Questions about a set of maximal groups.

use std::cmp::Ordering;
use std::str::FromStr;

use thiserror::Error;

use crate::groups::MaximalGroup;
use crate::reeb::ReebGraph;
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum QueryError {
    #[error("unknown query {0:?}")]
    UnknownQuery(String),
    #[error("query {0} needs {1}")]
    MissingArgument(&'static str, &'static str),
    #[error("time {time} outside [{start}, {end}]")]
    TimeOutOfRange { time: f64, start: f64, end: f64 },
    #[error("entity index {0} out of range")]
    UnknownEntity(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QueryKind {
    LargestAt,
    LongestAt,
    UngroupedCount,
    FirstStartAfter,
    FirstEndAfter,
    TotalGroupedTime,
    MaxPartners,
}

impl QueryKind {
    pub const ALL: [QueryKind; 7] = [
        QueryKind::LargestAt,
        QueryKind::LongestAt,
        QueryKind::UngroupedCount,
        QueryKind::FirstStartAfter,
        QueryKind::FirstEndAfter,
        QueryKind::TotalGroupedTime,
        QueryKind::MaxPartners,
    ];

    pub fn name(self) -> &'static str {
        match self {
            QueryKind::LargestAt => "largest-at",
            QueryKind::LongestAt => "longest-at",
            QueryKind::UngroupedCount => "ungrouped-count",
            QueryKind::FirstStartAfter => "first-start-after",
            QueryKind::FirstEndAfter => "first-end-after",
            QueryKind::TotalGroupedTime => "total-grouped-time",
            QueryKind::MaxPartners => "max-partners",
        }
    }

    /// Whether the query takes an entity rather than a time.
    pub fn takes_entity(self) -> bool {
        matches!(self, QueryKind::TotalGroupedTime | QueryKind::MaxPartners)
    }
}

impl FromStr for QueryKind {
    type Err = QueryError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        QueryKind::ALL.into_iter().find(|k| k.name() == s).ok_or_else(|| QueryError::UnknownQuery(s.to_string()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Query<T> {
    LargestAt(T),
    LongestAt(T),
    UngroupedCount(T),
    FirstStartAfter(T),
    FirstEndAfter(T),
    TotalGroupedTime(usize),
    MaxPartners(usize),
}

impl<T: Scalar> Query<T> {
    pub fn new(kind: QueryKind, time: Option<T>, entity: Option<usize>) -> Result<Self, QueryError> {
        let t = || time.ok_or(QueryError::MissingArgument(kind.name(), "a time"));
        let x = || entity.ok_or(QueryError::MissingArgument(kind.name(), "an entity"));
        Ok(match kind {
            QueryKind::LargestAt => Query::LargestAt(t()?),
            QueryKind::LongestAt => Query::LongestAt(t()?),
            QueryKind::UngroupedCount => Query::UngroupedCount(t()?),
            QueryKind::FirstStartAfter => Query::FirstStartAfter(t()?),
            QueryKind::FirstEndAfter => Query::FirstEndAfter(t()?),
            QueryKind::TotalGroupedTime => Query::TotalGroupedTime(x()?),
            QueryKind::MaxPartners => Query::MaxPartners(x()?),
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Answer<T> {
    Group(Option<MaximalGroup<T>>),
    Count(usize),
    Duration(T),
    /// Largest group shared with the entity and the number of other entities
    /// in it.
    Partners { partners: usize, group: Option<MaximalGroup<T>> },
}

/// Ranking used to break ties: larger first, then earlier start, then the
/// lexicographically smaller entity set.
fn rank<T: Scalar>(a: &MaximalGroup<T>, b: &MaximalGroup<T>) -> Ordering {
    b.size()
        .cmp(&a.size())
        .then(a.interval.start.total_order(b.interval.start))
        .then_with(|| a.entities.cmp(&b.entities))
}

fn best<'a, T: Scalar>(
    groups: impl Iterator<Item = &'a MaximalGroup<T>>,
    cmp: impl Fn(&MaximalGroup<T>, &MaximalGroup<T>) -> Ordering,
) -> Option<MaximalGroup<T>> {
    groups.min_by(|a, b| cmp(a, b)).cloned()
}

pub fn query<T: Scalar>(groups: &[MaximalGroup<T>], reeb: &ReebGraph<T>, q: Query<T>) -> Result<Answer<T>, QueryError> {
    let check_time = |t: T| {
        if t >= reeb.start_time() && t <= reeb.end_time() {
            Ok(t)
        } else {
            Err(QueryError::TimeOutOfRange {
                time: t.as_f64(),
                start: reeb.start_time().as_f64(),
                end: reeb.end_time().as_f64(),
            })
        }
    };
    let check_entity = |x: usize| if x < reeb.num_entities() { Ok(x) } else { Err(QueryError::UnknownEntity(x)) };
    let alive = |t: T| groups.iter().filter(move |g| g.interval.contains(t));
    Ok(match q {
        Query::LargestAt(t) => Answer::Group(best(alive(check_time(t)?), rank)),
        Query::LongestAt(t) => Answer::Group(best(alive(check_time(t)?), |a, b| {
            b.duration().total_order(a.duration()).then_with(|| rank(a, b))
        })),
        Query::UngroupedCount(t) => {
            let t = check_time(t)?;
            let mut covered = crate::model::EntitySet::empty(reeb.num_entities());
            for g in alive(t) {
                covered.union_with(&g.entities);
            }
            Answer::Count(reeb.num_entities() - covered.len())
        }
        Query::FirstStartAfter(t) => {
            let t = check_time(t)?;
            Answer::Group(best(groups.iter().filter(|g| g.interval.start > t), |a, b| {
                a.interval.start.total_order(b.interval.start).then_with(|| rank(a, b))
            }))
        }
        Query::FirstEndAfter(t) => {
            let t = check_time(t)?;
            Answer::Group(best(groups.iter().filter(|g| g.interval.end > t), |a, b| {
                a.interval.end.total_order(b.interval.end).then_with(|| rank(a, b))
            }))
        }
        Query::TotalGroupedTime(x) => {
            let x = check_entity(x)?;
            let mut spans: Vec<(T, T)> =
                groups.iter().filter(|g| g.entities.contains(x)).map(|g| (g.interval.start, g.interval.end)).collect();
            spans.sort_by(|a, b| a.0.total_order(b.0));
            let mut total = T::zero();
            let mut current: Option<(T, T)> = None;
            for (s, e) in spans {
                match current {
                    Some((cs, ce)) if s <= ce => current = Some((cs, ce.max(e))),
                    Some((cs, ce)) => {
                        total = total + (ce - cs);
                        current = Some((s, e));
                    }
                    None => current = Some((s, e)),
                }
            }
            if let Some((cs, ce)) = current {
                total = total + (ce - cs);
            }
            Answer::Duration(total)
        }
        Query::MaxPartners(x) => {
            let x = check_entity(x)?;
            let group = best(groups.iter().filter(|g| g.entities.contains(x)), rank);
            Answer::Partners { partners: group.as_ref().map_or(0, |g| g.size() - 1), group }
        }
    })
}
