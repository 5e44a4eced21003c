//! Paged waveform storage shared by all workers.
//!
//! Every waveform, given or computed, lives in one flat array of pages. A page
//! has `page_len` slots: `page_len - 1` transition slots and a trailing link
//! slot that holds the index of the waveform's next page. A waveform ends at a
//! terminate marker, which may also sit in the link slot of its last page.
//!
//! A slot is a 64-bit time plus an 8-bit value code (9 bytes). The terminate
//! marker is time `-1`; a link is the next page index in the time field with
//! value code `0xFF`.
//!
//! Pages are handed out by one shared counter and never reused. A waveform's
//! pages are written only by its producer; the producer publishes with a
//! release store of the waveform's known flag and readers acquire that flag
//! before touching any slot.

use std::fmt;
use std::sync::atomic::{AtomicBool, AtomicI64, AtomicU32, AtomicU8, AtomicUsize, Ordering};

use crate::error::{Error, Result};
use crate::logic4::Logic4;
use crate::netlist::NetId;

/// Bytes per stored slot: 64-bit time and 8-bit value.
pub const SLOT_BYTES: usize = 9;
pub const DEFAULT_PAGE_LEN: usize = 256;
pub const MIN_PAGE_LEN: usize = 4;

const TERMINATE: i64 = -1;
const LINK_TAG: u8 = 0xFF;
const NO_PAGE: u32 = u32::MAX;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct WaveformId(pub u32);

impl WaveformId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl From<NetId> for WaveformId {
    fn from(n: NetId) -> Self {
        WaveformId(n.0)
    }
}

impl fmt::Display for WaveformId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "w{}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Transition {
    pub time: i64,
    pub value: Logic4,
}

impl Transition {
    pub fn new(time: i64, value: Logic4) -> Self {
        Transition { time, value }
    }
}

/// Checks the waveform invariants: times strictly increase and are
/// non-negative, consecutive values differ, and the first value differs from
/// the implicit initial `X`. With `duration`, times must also not exceed it.
pub fn validate_transitions(id: usize, ts: &[Transition], duration: Option<i64>) -> Result<()> {
    let mut prev_value = Logic4::X;
    let mut prev_time = None;
    for (index, t) in ts.iter().enumerate() {
        if t.time < 0 || duration.is_some_and(|d| t.time > d) {
            return Err(Error::OutOfRange {
                waveform: id,
                index,
                duration: duration.unwrap_or(i64::MAX),
            });
        }
        if prev_time.is_some_and(|p| t.time <= p) {
            return Err(Error::NonMonotoneTime { waveform: id, index });
        }
        if t.value == prev_value {
            return Err(Error::RepeatedValue { waveform: id, index });
        }
        prev_time = Some(t.time);
        prev_value = t.value;
    }
    Ok(())
}

/// Upper bound on unused slot memory for `k` finished waveforms.
pub fn memory_waste_bound(page_len: u64, k: u64, slot_bytes: u64) -> u64 {
    page_len * k * slot_bytes
}

pub struct CsrpStore {
    page_len: usize,
    capacity_pages: usize,
    times: Box<[AtomicI64]>,
    values: Box<[AtomicU8]>,
    next_free_page: AtomicUsize,
    heads: Box<[AtomicU32]>,
    known: Box<[AtomicBool]>,
}

impl fmt::Debug for CsrpStore {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CsrpStore")
            .field("page_len", &self.page_len)
            .field("capacity_pages", &self.capacity_pages)
            .field("pages_used", &self.pages_used())
            .field("waveforms", &self.heads.len())
            .finish()
    }
}

impl CsrpStore {
    pub fn new(num_waveforms: usize, page_len: usize, capacity_pages: usize) -> Result<Self> {
        if num_waveforms == 0 || capacity_pages == 0 {
            return Err(Error::StoreArgs(format!(
                "need at least one waveform and one page (got {num_waveforms} waveforms, {capacity_pages} pages)"
            )));
        }
        if page_len < MIN_PAGE_LEN {
            return Err(Error::StoreArgs(format!(
                "page length {page_len} is below the minimum of {MIN_PAGE_LEN}"
            )));
        }
        if capacity_pages >= NO_PAGE as usize || num_waveforms >= u32::MAX as usize {
            return Err(Error::StoreArgs("more pages than a link can address".into()));
        }
        let slots = capacity_pages
            .checked_mul(page_len)
            .ok_or_else(|| Error::StoreArgs("slot count overflows".into()))?;
        Ok(CsrpStore {
            page_len,
            capacity_pages,
            times: (0..slots).map(|_| AtomicI64::new(0)).collect(),
            values: (0..slots).map(|_| AtomicU8::new(0)).collect(),
            next_free_page: AtomicUsize::new(0),
            heads: (0..num_waveforms).map(|_| AtomicU32::new(NO_PAGE)).collect(),
            known: (0..num_waveforms).map(|_| AtomicBool::new(false)).collect(),
        })
    }

    pub fn page_len(&self) -> usize {
        self.page_len
    }

    pub fn capacity_pages(&self) -> usize {
        self.capacity_pages
    }

    pub fn num_waveforms(&self) -> usize {
        self.heads.len()
    }

    pub fn slot_count(&self) -> usize {
        self.times.len()
    }

    pub fn pages_used(&self) -> usize {
        self.next_free_page.load(Ordering::Acquire)
    }

    /// Hands out the next free page. The counter never passes the capacity,
    /// so every index below it is owned by exactly one caller.
    pub fn alloc_page(&self) -> Result<u32> {
        self.next_free_page
            .fetch_update(Ordering::AcqRel, Ordering::Acquire, |n| {
                (n < self.capacity_pages).then_some(n + 1)
            })
            .map(|n| n as u32)
            .map_err(|_| Error::StoreFull {
                capacity_pages: self.capacity_pages,
                page_len: self.page_len,
                expansion: "n/a".into(),
            })
    }

    #[inline]
    pub fn is_known(&self, id: WaveformId) -> bool {
        self.known[id.index()].load(Ordering::Acquire)
    }

    pub fn all_known(&self) -> bool {
        self.known.iter().all(|k| k.load(Ordering::Acquire))
    }

    #[inline]
    fn write_slot(&self, slot: usize, time: i64, code: u8) {
        self.times[slot].store(time, Ordering::Relaxed);
        self.values[slot].store(code, Ordering::Relaxed);
    }

    fn check_unknown(&self, id: WaveformId) -> Result<()> {
        match self.known.get(id.index()) {
            None => Err(Error::Invalid(format!("no waveform {id}"))),
            Some(k) if k.load(Ordering::Acquire) => Err(Error::AlreadyKnown(id.index())),
            Some(_) => Ok(()),
        }
    }

    fn publish(&self, id: WaveformId, head: u32) {
        self.heads[id.index()].store(head, Ordering::Relaxed);
        self.known[id.index()].store(true, Ordering::Release);
    }

    /// Writes a complete, already known waveform (stimuli, or the serial
    /// engine's results).
    pub fn load_given_waveform(&self, id: WaveformId, transitions: &[Transition]) -> Result<()> {
        self.check_unknown(id)?;
        validate_transitions(id.index(), transitions, None)?;
        let mut w = PageWriter::default();
        w.finish(self, transitions)?;
        self.publish(id, w.head.expect("finish allocates a head"));
        Ok(())
    }

    pub fn cursor(&self, id: WaveformId) -> Result<WaveformCursor<'_>> {
        if !self
            .known
            .get(id.index())
            .ok_or_else(|| Error::Invalid(format!("no waveform {id}")))?
            .load(Ordering::Acquire)
        {
            return Err(Error::WaveformUnknown(id.index()));
        }
        let head = self.heads[id.index()].load(Ordering::Relaxed);
        Ok(WaveformCursor::new(self, head as usize * self.page_len))
    }

    pub fn read_waveform(&self, id: WaveformId) -> Result<Vec<Transition>> {
        Ok(self.cursor(id)?.collect())
    }

    /// Indices of the pages holding one known waveform, in chain order.
    pub fn page_chain(&self, id: WaveformId) -> Result<Vec<u32>> {
        let mut c = self.cursor(id)?;
        let mut pages = vec![(c.pos / self.page_len) as u32];
        while c.step().is_some() {
            let p = (c.pos.saturating_sub(1) / self.page_len) as u32;
            if *pages.last().unwrap() != p {
                pages.push(p);
            }
        }
        Ok(pages)
    }

    /// Walks every waveform (all must be known) and accounts for each
    /// allocated slot.
    pub fn usage(&self) -> Result<StoreUsage> {
        let mut transitions = 0u64;
        let mut links = 0u64;
        for i in 0..self.num_waveforms() {
            let mut c = self.cursor(WaveformId(i as u32))?;
            while c.step().is_some() {
                transitions += 1;
            }
            links += c.links_followed as u64;
        }
        let pages_used = self.pages_used() as u64;
        let waste_slots = pages_used * self.page_len as u64 - transitions - links;
        Ok(StoreUsage {
            pages_used,
            transitions,
            links,
            waste_slots,
            waste_bytes: waste_slots * SLOT_BYTES as u64,
            bound_bytes: memory_waste_bound(
                self.page_len as u64,
                self.num_waveforms() as u64,
                SLOT_BYTES as u64,
            ),
        })
    }

    /// Every waveform's transitions, indexed by waveform id.
    pub fn all_waveforms(&self) -> Result<Vec<Vec<Transition>>> {
        (0..self.num_waveforms())
            .map(|i| self.read_waveform(WaveformId(i as u32)))
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StoreUsage {
    pub pages_used: u64,
    pub transitions: u64,
    pub links: u64,
    /// Allocated slots holding neither a transition nor a link.
    pub waste_slots: u64,
    pub waste_bytes: u64,
    pub bound_bytes: u64,
}

/// Sequential reader over one published waveform.
pub struct WaveformCursor<'a> {
    store: &'a CsrpStore,
    pos: usize,
    done: bool,
    links_followed: usize,
}

impl<'a> WaveformCursor<'a> {
    fn new(store: &'a CsrpStore, pos: usize) -> Self {
        WaveformCursor {
            store,
            pos,
            done: false,
            links_followed: 0,
        }
    }

    #[inline]
    fn step(&mut self) -> Option<Transition> {
        if self.done {
            return None;
        }
        let len = self.store.page_len;
        loop {
            let time = self.store.times[self.pos].load(Ordering::Relaxed);
            if time == TERMINATE {
                self.done = true;
                return None;
            }
            let code = self.store.values[self.pos].load(Ordering::Relaxed);
            if self.pos % len == len - 1 {
                debug_assert_eq!(code, LINK_TAG);
                self.pos = time as usize * len;
                self.links_followed += 1;
                continue;
            }
            self.pos += 1;
            let value = Logic4::from_code(code).expect("valid value code in data slot");
            return Some(Transition { time, value });
        }
    }
}

impl Iterator for WaveformCursor<'_> {
    type Item = Transition;

    #[inline]
    fn next(&mut self) -> Option<Transition> {
        self.step()
    }
}

/// Producer-side page bookkeeping for one waveform.
#[derive(Debug, Default, Clone)]
struct PageWriter {
    head: Option<u32>,
    /// Last page written; always completely filled with transitions.
    tail: Option<u32>,
}

impl PageWriter {
    fn new_page(&mut self, store: &CsrpStore) -> Result<u32> {
        let page = store.alloc_page()?;
        match self.tail {
            Some(prev) => {
                let link = prev as usize * store.page_len + store.page_len - 1;
                store.write_slot(link, page as i64, LINK_TAG);
            }
            None => self.head = Some(page),
        }
        Ok(page)
    }

    /// Writes exactly one page worth of transitions into a fresh page.
    fn write_full_page(&mut self, store: &CsrpStore, chunk: &[Transition]) -> Result<()> {
        debug_assert_eq!(chunk.len(), store.page_len - 1);
        let page = self.new_page(store)?;
        let base = page as usize * store.page_len;
        for (o, t) in chunk.iter().enumerate() {
            store.write_slot(base + o, t.time, t.value as u8);
        }
        self.tail = Some(page);
        Ok(())
    }

    /// Writes the remaining transitions and the terminate marker.
    fn finish(&mut self, store: &CsrpStore, rest: &[Transition]) -> Result<()> {
        let per_page = store.page_len - 1;
        let mut chunks = rest.chunks(per_page).peekable();
        while let Some(chunk) = chunks.next() {
            if chunk.len() == per_page {
                self.write_full_page(store, chunk)?;
                continue;
            }
            // Short final chunk: terminate right after it.
            let page = self.new_page(store)?;
            let base = page as usize * store.page_len;
            for (o, t) in chunk.iter().enumerate() {
                store.write_slot(base + o, t.time, t.value as u8);
            }
            store.write_slot(base + chunk.len(), TERMINATE, 0);
            self.tail = Some(page);
            debug_assert!(chunks.peek().is_none());
            return Ok(());
        }
        match self.tail {
            // Last page is full: the terminate marker takes its link slot.
            Some(page) => {
                store.write_slot(page as usize * store.page_len + per_page, TERMINATE, 0);
            }
            None => {
                let page = self.new_page(store)?;
                store.write_slot(page as usize * store.page_len, TERMINATE, 0);
                self.tail = Some(page);
            }
        }
        Ok(())
    }
}

/// Worker-private staging buffer for one output waveform under construction.
///
/// Holds up to `1.5 * (page_len - 1)` transitions so that pulse filtering can
/// revise recent transitions before they reach the shared store. When full,
/// the oldest page worth is flushed.
#[derive(Debug)]
pub struct ScratchBuffer {
    owner: usize,
    capacity: usize,
    per_page: usize,
    buf: Vec<Transition>,
    waveform: Option<WaveformId>,
    horizon: i64,
    writer: PageWriter,
    flushed_count: usize,
    settled_value: Logic4,
    last_flushed_time: Option<i64>,
}

impl ScratchBuffer {
    pub fn new(owner: usize, page_len: usize) -> Self {
        let per_page = page_len - 1;
        let capacity = per_page * 3 / 2;
        ScratchBuffer {
            owner,
            capacity,
            per_page,
            buf: Vec::with_capacity(capacity),
            waveform: None,
            horizon: i64::MAX,
            writer: PageWriter::default(),
            flushed_count: 0,
            settled_value: Logic4::X,
            last_flushed_time: None,
        }
    }

    pub fn owner(&self) -> usize {
        self.owner
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn len(&self) -> usize {
        self.buf.len()
    }

    pub fn is_empty(&self) -> bool {
        self.buf.is_empty()
    }

    pub fn buffered(&self) -> &[Transition] {
        &self.buf
    }

    pub fn flushed_count(&self) -> usize {
        self.flushed_count
    }

    pub fn settled_value(&self) -> Logic4 {
        self.settled_value
    }

    /// Starts a new output waveform. Transitions later than `horizon` are
    /// discarded.
    pub fn begin(&mut self, id: WaveformId, horizon: i64) {
        self.buf.clear();
        self.waveform = Some(id);
        self.horizon = horizon;
        self.writer = PageWriter::default();
        self.flushed_count = 0;
        self.settled_value = Logic4::X;
        self.last_flushed_time = None;
    }

    fn id(&self) -> Result<WaveformId> {
        self.waveform
            .ok_or_else(|| Error::Invalid("scratch buffer has no waveform in progress".into()))
    }

    /// Schedules `value` at `time`. Calls must come in non-decreasing order of
    /// determination time.
    ///
    /// Every buffered transition at or after `time` is denied first (it was
    /// determined earlier but would appear no earlier). The new transition is
    /// then dropped if it repeats the current last value.
    ///
    /// Dropping transitions beyond the horizon here gives the same result as
    /// clipping at finalize: such a transition can only deny transitions that
    /// are themselves beyond the horizon.
    pub fn append(&mut self, store: &CsrpStore, value: Logic4, time: i64) -> Result<()> {
        let id = self.id()?;
        if time > self.horizon {
            return Ok(());
        }
        while self.buf.last().is_some_and(|t| t.time >= time) {
            self.buf.pop();
        }
        if self.buf.is_empty() {
            if let Some(last) = self.last_flushed_time.filter(|&l| l >= time) {
                return Err(Error::GlitchBacktraceOverflow {
                    waveform: id.index(),
                    time,
                    last_flushed: last,
                });
            }
        }
        let prev = self.buf.last().map_or(self.settled_value, |t| t.value);
        if prev == value {
            return Ok(());
        }
        self.buf.push(Transition { time, value });
        if self.buf.len() >= self.capacity {
            self.flush_prefix(store)?;
        }
        Ok(())
    }

    /// Moves the oldest page worth of transitions into a fresh store page and
    /// shifts the remainder to the front.
    pub fn flush_prefix(&mut self, store: &CsrpStore) -> Result<()> {
        self.id()?;
        if self.buf.len() < self.per_page {
            return Err(Error::Invalid(format!(
                "flush needs {} buffered transitions, have {}",
                self.per_page,
                self.buf.len()
            )));
        }
        self.writer.write_full_page(store, &self.buf[..self.per_page])?;
        let last = self.buf[self.per_page - 1];
        self.settled_value = last.value;
        self.last_flushed_time = Some(last.time);
        self.flushed_count += self.per_page;
        self.buf.drain(..self.per_page);
        Ok(())
    }

    /// Writes everything still buffered plus the terminate marker, then
    /// publishes the waveform.
    pub fn finalize(&mut self, store: &CsrpStore) -> Result<()> {
        let id = self.id()?;
        store.check_unknown(id)?;
        self.writer.finish(store, &self.buf)?;
        self.flushed_count += self.buf.len();
        self.buf.clear();
        store.publish(id, self.writer.head.expect("finish allocates a head"));
        self.waveform = None;
        Ok(())
    }
}
