import { describe, expect, it } from 'vitest';

import { parseServerMessage } from '../src/protocol.js';
import { makeFrame, demoHello } from './mocks.js';

describe('parseServerMessage', () => {
  it('parses hello, frame, and error messages', () => {
    expect(parseServerMessage(JSON.stringify(demoHello))?.type).toBe('hello');
    expect(parseServerMessage(JSON.stringify(makeFrame()))?.type).toBe('frame');
    expect(
      parseServerMessage(JSON.stringify({ type: 'error', reason: 'nope' }))?.type,
    ).toBe('error');
  });

  it('rejects garbage', () => {
    expect(parseServerMessage('not json')).toBeNull();
    expect(parseServerMessage('42')).toBeNull();
    expect(parseServerMessage(JSON.stringify({ type: 'unknown' }))).toBeNull();
    expect(parseServerMessage(JSON.stringify({ type: 'hello' }))).toBeNull();
    expect(
      parseServerMessage(JSON.stringify({ type: 'frame', rows: 2 })),
    ).toBeNull();
    expect(parseServerMessage(JSON.stringify({ type: 'error' }))).toBeNull();
  });
});
