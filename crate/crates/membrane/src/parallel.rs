//! Deterministic fork-join over independent jobs.

/// Run `f` over `items` on up to `threads` workers, returning results in the
/// input order. Each job is independent; the merge order is fixed, so the
/// output is identical for any thread count.
pub fn map_indexed<T, R, F>(items: Vec<T>, threads: usize, f: F) -> Vec<R>
where
    T: Send,
    R: Send,
    F: Fn(usize, T) -> R + Sync,
{
    let threads = threads.max(1);
    if threads == 1 || items.len() <= 1 {
        return items.into_iter().enumerate().map(|(i, t)| f(i, t)).collect();
    }
    let jobs: Vec<(usize, T)> = items.into_iter().enumerate().collect();
    let queue = std::sync::Mutex::new(jobs.into_iter());
    let mut slots: Vec<Option<R>> = Vec::new();
    slots.resize_with(queue.lock().unwrap().len(), || None);
    let out = std::sync::Mutex::new(slots);
    std::thread::scope(|scope| {
        for _ in 0..threads {
            scope.spawn(|| loop {
                let job = queue.lock().unwrap().next();
                match job {
                    Some((i, t)) => {
                        let r = f(i, t);
                        out.lock().unwrap()[i] = Some(r);
                    }
                    None => break,
                }
            });
        }
    });
    out.into_inner()
        .unwrap()
        .into_iter()
        .map(|r| r.expect("every job writes its slot"))
        .collect()
}
