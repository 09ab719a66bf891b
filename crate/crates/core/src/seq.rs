//! Memoized, deterministic, lazily evaluated infinite sequences.

use std::fmt;
use std::sync::{Arc, Mutex};

type Step<T> = dyn Fn(usize, &[T]) -> T + Send + Sync;

/// An infinite sequence whose `i`-th term is computed from `i` and the terms
/// before it. Terms are computed once and cached; clones share the cache.
pub struct Seq<T> {
    inner: Arc<SeqInner<T>>,
}

struct SeqInner<T> {
    step: Box<Step<T>>,
    cache: Mutex<Vec<T>>,
}

impl<T> Clone for Seq<T> {
    fn clone(&self) -> Self {
        Seq {
            inner: Arc::clone(&self.inner),
        }
    }
}

impl<T: Clone + Send + 'static> Seq<T> {
    /// A sequence defined by a recurrence over its own prefix.
    pub fn recursive(step: impl Fn(usize, &[T]) -> T + Send + Sync + 'static) -> Self {
        Seq {
            inner: Arc::new(SeqInner {
                step: Box::new(step),
                cache: Mutex::new(Vec::new()),
            }),
        }
    }

    /// A sequence given by a closed formula in the index.
    pub fn from_fn(f: impl Fn(usize) -> T + Send + Sync + 'static) -> Self {
        Self::recursive(move |i, _| f(i))
    }

    pub fn get(&self, i: usize) -> T {
        self.ensure(i + 1);
        self.inner.cache.lock().unwrap()[i].clone()
    }

    /// The first `n` terms.
    pub fn take(&self, n: usize) -> Vec<T> {
        self.ensure(n);
        self.inner.cache.lock().unwrap()[..n].to_vec()
    }

    /// Index of the first term (among the first `limit`) satisfying `pred`.
    pub fn position(&self, limit: usize, pred: impl FnMut(&T) -> bool) -> Option<usize> {
        self.ensure(limit);
        let cache = self.inner.cache.lock().unwrap();
        cache[..limit].iter().position(pred)
    }

    pub fn computed(&self) -> usize {
        self.inner.cache.lock().unwrap().len()
    }

    fn ensure(&self, n: usize) {
        let mut cache = self.inner.cache.lock().unwrap();
        while cache.len() < n {
            let i = cache.len();
            let next = (self.inner.step)(i, &cache);
            cache.push(next);
        }
    }
}

impl<T> fmt::Debug for Seq<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let n = self.inner.cache.lock().map(|c| c.len()).unwrap_or(0);
        write!(f, "Seq {{ computed: {n} }}")
    }
}
