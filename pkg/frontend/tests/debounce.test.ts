import { afterEach, beforeEach, expect, test, vi } from "vitest";
import { debounce } from "../src/debounce.js";

beforeEach(() => {
  vi.useFakeTimers();
});

afterEach(() => {
  vi.useRealTimers();
});

test("runs once with the last arguments after the delay", () => {
  const fn = vi.fn();
  const d = debounce(fn, 150);
  d(1);
  d(2);
  d(3);
  expect(fn).not.toHaveBeenCalled();
  vi.advanceTimersByTime(149);
  expect(fn).not.toHaveBeenCalled();
  vi.advanceTimersByTime(1);
  expect(fn).toHaveBeenCalledTimes(1);
  expect(fn).toHaveBeenCalledWith(3);
});

test("a call during the wait restarts the clock", () => {
  const fn = vi.fn();
  const d = debounce(fn, 150);
  d("a");
  vi.advanceTimersByTime(100);
  d("b");
  vi.advanceTimersByTime(100);
  expect(fn).not.toHaveBeenCalled();
  vi.advanceTimersByTime(50);
  expect(fn).toHaveBeenCalledTimes(1);
  expect(fn).toHaveBeenCalledWith("b");
});

test("separate bursts each fire", () => {
  const fn = vi.fn();
  const d = debounce(fn, 150);
  d(1);
  vi.advanceTimersByTime(150);
  d(2);
  vi.advanceTimersByTime(150);
  expect(fn).toHaveBeenCalledTimes(2);
});

test("flush runs a pending call immediately", () => {
  const fn = vi.fn();
  const d = debounce(fn, 150);
  d("now");
  d.flush();
  expect(fn).toHaveBeenCalledTimes(1);
  expect(fn).toHaveBeenCalledWith("now");
  vi.advanceTimersByTime(300);
  expect(fn).toHaveBeenCalledTimes(1);
});

test("flush without a pending call does nothing", () => {
  const fn = vi.fn();
  const d = debounce(fn, 150);
  d.flush();
  expect(fn).not.toHaveBeenCalled();
});

test("cancel drops the pending call", () => {
  const fn = vi.fn();
  const d = debounce(fn, 150);
  d("dropped");
  d.cancel();
  vi.advanceTimersByTime(300);
  expect(fn).not.toHaveBeenCalled();
});
